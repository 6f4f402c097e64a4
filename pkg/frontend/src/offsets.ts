// The API counts Unicode scalar values; JavaScript strings index UTF-16
// code units. Astral characters (surrogate pairs) make the two diverge,
// so highlight ranges must be mapped before slicing.

export interface Segment {
  text: string;
  highlighted: boolean;
}

/** UTF-16 index of the given Unicode-scalar offset, or -1 if out of range. */
export function scalarToUtf16(text: string, scalarOffset: number): number {
  if (scalarOffset < 0) return -1;
  let units = 0;
  let scalars = 0;
  for (const ch of text) {
    if (scalars === scalarOffset) return units;
    units += ch.length; // 2 for surrogate pairs
    scalars += 1;
  }
  return scalars === scalarOffset ? units : -1;
}

/**
 * Split text into highlighted/plain segments from a scalar-offset range.
 * Out-of-range offsets render the whole text unhighlighted (with a console
 * warning) rather than throwing.
 */
export function segmentByScalarRange(
  text: string,
  start: number,
  end: number,
): Segment[] {
  const u16Start = scalarToUtf16(text, start);
  const u16End = scalarToUtf16(text, end);
  if (u16Start < 0 || u16End < 0 || u16Start >= u16End) {
    console.warn(`highlight range (${start}, ${end}) out of range for text`);
    return [{ text, highlighted: false }];
  }
  const segments: Segment[] = [];
  if (u16Start > 0) segments.push({ text: text.slice(0, u16Start), highlighted: false });
  segments.push({ text: text.slice(u16Start, u16End), highlighted: true });
  if (u16End < text.length) segments.push({ text: text.slice(u16End), highlighted: false });
  return segments;
}
