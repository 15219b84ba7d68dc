/** Web Mercator math shared by the tile layer and the marker layer.
 *
 * World pixel coordinates put (0, 0) at the top-left of the map at a given
 * zoom; the world is TILE_SIZE * 2^zoom pixels square.
 */

export const TILE_SIZE = 256;

/** Web Mercator is undefined at the poles; tiles stop at ±85.0511°. */
export const MAX_LATITUDE = 85.05112878;

export function clampLat(lat: number): number {
  return Math.max(-MAX_LATITUDE, Math.min(MAX_LATITUDE, lat));
}

export function worldSize(zoom: number): number {
  return TILE_SIZE * Math.pow(2, zoom);
}

export function lonToX(lon: number, zoom: number): number {
  return ((lon + 180) / 360) * worldSize(zoom);
}

export function latToY(lat: number, zoom: number): number {
  const rad = (clampLat(lat) * Math.PI) / 180;
  const merc = Math.log(Math.tan(Math.PI / 4 + rad / 2));
  return ((1 - merc / Math.PI) / 2) * worldSize(zoom);
}

export function xToLon(x: number, zoom: number): number {
  return (x / worldSize(zoom)) * 360 - 180;
}

export function yToLat(y: number, zoom: number): number {
  const merc = Math.PI * (1 - (2 * y) / worldSize(zoom));
  return ((2 * Math.atan(Math.exp(merc)) - Math.PI / 2) * 180) / Math.PI;
}

export interface Point {
  x: number;
  y: number;
}

export function project(lat: number, lon: number, zoom: number): Point {
  return { x: lonToX(lon, zoom), y: latToY(lat, zoom) };
}

export function unproject(point: Point, zoom: number): { lat: number; lon: number } {
  return { lat: yToLat(point.y, zoom), lon: xToLon(point.x, zoom) };
}

/** Tile column/row containing a world pixel, wrapped across the antimeridian. */
export function tileAt(x: number, y: number, zoom: number): { tx: number; ty: number } {
  const tiles = Math.pow(2, zoom);
  const tx = ((Math.floor(x / TILE_SIZE) % tiles) + tiles) % tiles;
  const ty = Math.max(0, Math.min(tiles - 1, Math.floor(y / TILE_SIZE)));
  return { tx, ty };
}

/** Expand a tile URL template with {x}, {y}, {z} and an optional api key. */
export function tileUrl(
  template: string,
  tx: number,
  ty: number,
  zoom: number,
  apiKey: string | null,
): string {
  let url = template
    .replace('{x}', String(tx))
    .replace('{y}', String(ty))
    .replace('{z}', String(zoom));
  if (apiKey) {
    url += (url.includes('?') ? '&' : '?') + 'key=' + encodeURIComponent(apiKey);
  }
  return url;
}
