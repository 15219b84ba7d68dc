/** Shapes served by the portal HTTP API. */

export interface Location {
  lat: number;
  lon: number;
}

export interface Resource {
  id: string;
  hostname: string;
  type: string;
  label: string;
  port: number | null;
  endpoint: string | null;
  location: Location;
  enabled: boolean;
}

export type Status = 'UP' | 'DOWN' | 'UNKNOWN';

export interface ResourceEntry {
  resource: Resource;
  status: Status;
  stale: boolean;
  list_row_html: string;
}

export interface MapConfig {
  tile_url_template: string;
  api_key: string | null;
  center: Location;
  zoom: number;
  width: number;
  height: number;
  allow_pan: boolean;
  allow_zoom: boolean;
}

export type Mode = 'display' | 'edit';

export interface UiState {
  resources: ResourceEntry[];
  filter: string;
  /** ids matching the current filter, or null when no filter is active */
  matchIds: string[] | null;
  selectedId: string | null;
  mode: Mode;
  mapConfig: MapConfig | null;
}

export function initialState(): UiState {
  return {
    resources: [],
    filter: '',
    matchIds: null,
    selectedId: null,
    mode: 'display',
    mapConfig: null,
  };
}

/** Resources that pass the active search filter, in server order. */
export function visibleResources(state: UiState): ResourceEntry[] {
  if (state.matchIds === null) {
    return state.resources;
  }
  const keep = new Set(state.matchIds);
  return state.resources.filter((e) => keep.has(e.resource.id));
}

export function markerColor(status: Status): string {
  switch (status) {
    case 'UP':
      return '#2e8b57';
    case 'DOWN':
      return '#c0392b';
    default:
      return '#7f8c8d';
  }
}
