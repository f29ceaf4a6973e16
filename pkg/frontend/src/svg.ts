// Hand-built SVG primitives: no plotting dependency, deterministic output.

export interface Panel {
  x: number;
  y: number;
  width: number;
  height: number;
  xMin: number;
  xMax: number;
  yMin: number;
  yMax: number;
}

const c = (v: number) => v.toFixed(2);

export function mapX(p: Panel, x: number): number {
  const span = p.xMax - p.xMin || 1;
  return p.x + ((x - p.xMin) / span) * p.width;
}

export function mapY(p: Panel, y: number): number {
  const span = p.yMax - p.yMin || 1;
  return p.y + p.height - ((y - p.yMin) / span) * p.height;
}

export function svgDocument(width: number, height: number, body: string[]): string {
  return [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}">`,
    `<rect width="${width}" height="${height}" fill="white"/>`,
    ...body,
    "</svg>",
    "",
  ].join("\n");
}

export function frame(p: Panel): string {
  return `<rect x="${c(p.x)}" y="${c(p.y)}" width="${c(p.width)}" height="${c(
    p.height,
  )}" fill="none" stroke="#333" stroke-width="1"/>`;
}

export function polyline(
  p: Panel,
  xs: number[],
  ys: number[],
  stroke: string,
  dash = "",
): string {
  const pts = xs.map((x, i) => `${c(mapX(p, x))},${c(mapY(p, ys[i]))}`).join(" ");
  const dashAttr = dash ? ` stroke-dasharray="${dash}"` : "";
  return `<polyline points="${pts}" fill="none" stroke="${stroke}" stroke-width="1.5"${dashAttr}/>`;
}

export function polygon(p: Panel, xs: number[], ys: number[], fill: string): string {
  const pts = xs.map((x, i) => `${c(mapX(p, x))},${c(mapY(p, ys[i]))}`).join(" ");
  return `<polygon points="${pts}" fill="${fill}" stroke="none"/>`;
}

export function circles(p: Panel, xs: number[], ys: number[], fill: string): string {
  return xs
    .map(
      (x, i) =>
        `<circle cx="${c(mapX(p, x))}" cy="${c(mapY(p, ys[i]))}" r="3.5" fill="${fill}"/>`,
    )
    .join("\n");
}

export function text(
  x: number,
  y: number,
  content: string,
  anchor = "start",
  size = 12,
): string {
  return `<text x="${c(x)}" y="${c(y)}" font-family="monospace" font-size="${size}" text-anchor="${anchor}">${content}</text>`;
}

export function xTicks(p: Panel, values: number[], label: (v: number) => string): string {
  return values
    .map((v) => {
      const px = mapX(p, v);
      return (
        `<line x1="${c(px)}" y1="${c(p.y + p.height)}" x2="${c(px)}" y2="${c(
          p.y + p.height + 5,
        )}" stroke="#333"/>` +
        text(px, p.y + p.height + 18, label(v), "middle", 10)
      );
    })
    .join("\n");
}

export function yTicks(p: Panel, values: number[], label: (v: number) => string): string {
  return values
    .map((v) => {
      const py = mapY(p, v);
      return (
        `<line x1="${c(p.x - 5)}" y1="${c(py)}" x2="${c(p.x)}" y2="${c(py)}" stroke="#333"/>` +
        text(p.x - 8, py + 3, label(v), "end", 10)
      );
    })
    .join("\n");
}
