export {
  ApiClient,
  ApiError,
  type CurvePayload,
  type FetchLike,
  type GenerationPage,
  type GenomePayload,
  type GradeAck,
  type IndividualPayload,
  type JudgmentResponse,
  type MetricsResponse,
  type Point,
  type SessionSummary,
  type TraceEntry,
  type TraceResponse,
  type TrialResponse,
  type VariantResponse,
} from "./api.js";
export {
  CARD_VIEWPORT,
  FITNESS_LEVELS,
  errorCard,
  fitTransform,
  renderIndividualCard,
  renderSilhouette,
  svgPath,
  type Viewport,
} from "./render.js";
export {
  LEVEL_PERCENT,
  SIMILARITY_LEVELS,
  levelLabel,
  levelOptions,
  type LevelOption,
} from "./levels.js";
export {
  HARD_MIN_POINTS,
  RECOMMENDED_MIN_POINTS,
  TraceCanvas,
} from "./trace.js";
export { EvaluationPage, type CardState } from "./evaluation.js";
export { CalibrationWizard } from "./calibration.js";
export { DesignStudio } from "./app.js";
