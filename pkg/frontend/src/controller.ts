/** UI state transitions, kept free of DOM access so they are unit-testable.
 * The view layer subscribes via onChange and re-renders from the state.
 */

import type { Api } from './api.js';
import { initialState, type Location, type UiState } from './types.js';

export class PortalController {
  state: UiState = initialState();
  private searchAbort: AbortController | null = null;
  private listAbort: AbortController | null = null;

  constructor(
    private api: Api,
    private onChange: (state: UiState) => void = () => {},
  ) {}

  private emit(): void {
    this.onChange(this.state);
  }

  async loadMapConfig(): Promise<void> {
    this.state.mapConfig = await this.api.getMapConfig();
    this.emit();
  }

  /** Refresh the resource list; a newer refresh supersedes an in-flight one. */
  async refresh(): Promise<void> {
    this.listAbort?.abort();
    this.listAbort = new AbortController();
    try {
      this.state.resources = await this.api.listResources(this.listAbort.signal);
    } catch (err) {
      if ((err as Error).name === 'AbortError') {
        return;
      }
      throw err;
    }
    this.emit();
  }

  /** Apply a search keyword; empty clears the filter without a server call. */
  async setFilter(keyword: string): Promise<void> {
    this.state.filter = keyword;
    this.searchAbort?.abort();
    if (keyword === '') {
      this.state.matchIds = null;
      this.emit();
      return;
    }
    this.searchAbort = new AbortController();
    try {
      this.state.matchIds = await this.api.search(keyword, this.searchAbort.signal);
    } catch (err) {
      if ((err as Error).name === 'AbortError') {
        return;
      }
      throw err;
    }
    this.emit();
  }

  select(id: string | null): void {
    this.state.selectedId = id;
    this.emit();
  }

  enterEditMode(): void {
    this.state.mode = 'edit';
    this.emit();
  }

  exitEditMode(): void {
    this.state.mode = 'display';
    this.emit();
  }

  /** Persist a click-placed location. Refuses outside edit mode: display mode
   * must never issue mutation calls. */
  async saveLocation(id: string, location: Location): Promise<void> {
    if (this.state.mode !== 'edit') {
      throw new Error('location edits are only allowed in edit mode');
    }
    await this.api.updateResource(id, { location });
    await this.refresh();
  }

  async saveMapConfig(patch: Record<string, unknown>): Promise<void> {
    if (this.state.mode !== 'edit') {
      throw new Error('map configuration edits are only allowed in edit mode');
    }
    this.state.mapConfig = await this.api.putMapConfig(patch);
    this.emit();
  }
}
