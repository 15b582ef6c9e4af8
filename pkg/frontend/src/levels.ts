// The seven-level similarity scale shared with the service. The percents are
// display copy for the picker; the server computes every judged number.

export const LEVEL_PERCENT: Record<number, number> = {
  0: 5,
  1: 30,
  2: 50,
  3: 65,
  4: 80,
  5: 90,
  6: 100,
};

export const SIMILARITY_LEVELS = [0, 1, 2, 3, 4, 5, 6] as const;

export type LevelOption = { level: number; label: string };

export function levelLabel(level: number): string {
  const percent = LEVEL_PERCENT[level];
  if (percent === undefined) {
    throw new RangeError(`similarity level ${level} outside 0..6`);
  }
  return `${percent}%`;
}

export function levelOptions(): LevelOption[] {
  return SIMILARITY_LEVELS.map((level) => ({ level, label: levelLabel(level) }));
}
