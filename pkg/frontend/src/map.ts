/** Hand-rolled slippy map: positioned tile images, absolutely positioned
 * status markers, and a popup anchored above the selected marker.
 */

import {
  clampLat,
  project,
  TILE_SIZE,
  tileAt,
  tileUrl,
  unproject,
  worldSize,
} from './projection.js';
import { markerColor, type MapConfig, type ResourceEntry } from './types.js';

export interface MapCallbacks {
  onMarkerClick(id: string): void;
  onMapClick(lat: number, lon: number): void;
}

export class SlippyMap {
  private center: { lat: number; lon: number };
  private zoom: number;
  private tileLayer: HTMLDivElement;
  private markerLayer: HTMLDivElement;
  private popupEl: HTMLDivElement;
  private pendingEl: HTMLDivElement | null = null;
  private dragging = false;
  private dragStart = { x: 0, y: 0 };

  constructor(
    private container: HTMLElement,
    private config: MapConfig,
    private callbacks: MapCallbacks,
  ) {
    this.center = { ...config.center };
    this.zoom = config.zoom;
    container.classList.add('gw-map');
    container.style.width = `${config.width}px`;
    container.style.height = `${config.height}px`;

    this.tileLayer = document.createElement('div');
    this.tileLayer.className = 'gw-tiles';
    this.markerLayer = document.createElement('div');
    this.markerLayer.className = 'gw-markers';
    this.popupEl = document.createElement('div');
    this.popupEl.className = 'gw-popup';
    this.popupEl.hidden = true;
    container.append(this.tileLayer, this.markerLayer, this.popupEl);

    container.addEventListener('click', (ev) => this.handleClick(ev));
    if (config.allow_pan) {
      container.addEventListener('mousedown', (ev) => this.startDrag(ev));
      window.addEventListener('mousemove', (ev) => this.moveDrag(ev));
      window.addEventListener('mouseup', () => (this.dragging = false));
    }
    if (config.allow_zoom) {
      container.addEventListener('wheel', (ev) => {
        ev.preventDefault();
        this.setZoom(this.zoom + (ev.deltaY < 0 ? 1 : -1));
      });
      this.addZoomControls();
    }
  }

  setZoom(zoom: number): void {
    this.zoom = Math.max(0, Math.min(19, zoom));
    this.renderTiles();
  }

  private addZoomControls(): void {
    const controls = document.createElement('div');
    controls.className = 'gw-zoom';
    for (const [text, delta] of [
      ['+', 1],
      ['−', -1],
    ] as const) {
      const button = document.createElement('button');
      button.textContent = text;
      button.addEventListener('click', (ev) => {
        ev.stopPropagation();
        this.setZoom(this.zoom + delta);
      });
      controls.append(button);
    }
    this.container.append(controls);
  }

  /** World pixel of the viewport's top-left corner. */
  private origin(): { x: number; y: number } {
    const c = project(this.center.lat, this.center.lon, this.zoom);
    return { x: c.x - this.config.width / 2, y: c.y - this.config.height / 2 };
  }

  private startDrag(ev: MouseEvent): void {
    this.dragging = true;
    this.dragStart = { x: ev.clientX, y: ev.clientY };
  }

  private moveDrag(ev: MouseEvent): void {
    if (!this.dragging) {
      return;
    }
    const dx = ev.clientX - this.dragStart.x;
    const dy = ev.clientY - this.dragStart.y;
    this.dragStart = { x: ev.clientX, y: ev.clientY };
    const c = project(this.center.lat, this.center.lon, this.zoom);
    const moved = unproject({ x: c.x - dx, y: c.y - dy }, this.zoom);
    this.center = { lat: clampLat(moved.lat), lon: moved.lon };
    this.renderTiles();
  }

  private handleClick(ev: MouseEvent): void {
    const target = ev.target as HTMLElement;
    if (target.closest('.gw-marker') || target.closest('.gw-zoom')) {
      return;
    }
    const rect = this.container.getBoundingClientRect();
    const origin = this.origin();
    const clicked = unproject(
      { x: origin.x + (ev.clientX - rect.left), y: origin.y + (ev.clientY - rect.top) },
      this.zoom,
    );
    this.callbacks.onMapClick(clicked.lat, clicked.lon);
  }

  renderTiles(): void {
    this.tileLayer.replaceChildren();
    const origin = this.origin();
    const size = worldSize(this.zoom);
    const firstX = Math.floor(origin.x / TILE_SIZE) * TILE_SIZE;
    const firstY = Math.floor(origin.y / TILE_SIZE) * TILE_SIZE;
    for (let y = firstY; y < origin.y + this.config.height; y += TILE_SIZE) {
      if (y < 0 || y >= size) {
        continue;
      }
      for (let x = firstX; x < origin.x + this.config.width; x += TILE_SIZE) {
        const { tx, ty } = tileAt(x + 1, y + 1, this.zoom);
        const img = document.createElement('img');
        img.src = tileUrl(
          this.config.tile_url_template,
          tx,
          ty,
          this.zoom,
          this.config.api_key,
        );
        img.className = 'gw-tile';
        img.style.left = `${x - origin.x}px`;
        img.style.top = `${y - origin.y}px`;
        img.draggable = false;
        this.tileLayer.append(img);
      }
    }
  }

  renderMarkers(entries: ResourceEntry[]): void {
    this.markerLayer.replaceChildren();
    const origin = this.origin();
    for (const entry of entries) {
      const p = project(entry.resource.location.lat, entry.resource.location.lon, this.zoom);
      const marker = document.createElement('div');
      marker.className = 'gw-marker';
      marker.dataset.id = entry.resource.id;
      marker.style.left = `${p.x - origin.x}px`;
      marker.style.top = `${p.y - origin.y}px`;
      marker.style.background = markerColor(entry.status);
      marker.title = entry.resource.label || entry.resource.hostname;
      if (entry.stale) {
        const badge = document.createElement('span');
        badge.className = 'gw-stale-badge';
        badge.textContent = '!';
        marker.append(badge);
      }
      marker.addEventListener('click', (ev) => {
        ev.stopPropagation();
        this.callbacks.onMarkerClick(entry.resource.id);
      });
      this.markerLayer.append(marker);
    }
  }

  /** Show the popup fragment above the marker for `id`; null hides it. */
  showPopup(id: string | null, html: string): void {
    if (id === null) {
      this.popupEl.hidden = true;
      return;
    }
    const marker = this.markerLayer.querySelector<HTMLElement>(
      `.gw-marker[data-id="${CSS.escape(id)}"]`,
    );
    if (!marker) {
      this.popupEl.hidden = true;
      return;
    }
    this.popupEl.innerHTML = html;
    this.popupEl.hidden = false;
    this.popupEl.style.left = marker.style.left;
    this.popupEl.style.top = `${parseFloat(marker.style.top) - 12}px`;
  }

  /** Green pending marker for a click-placed location in edit mode. */
  showPending(lat: number, lon: number): void {
    if (!this.pendingEl) {
      this.pendingEl = document.createElement('div');
      this.pendingEl.className = 'gw-marker gw-pending';
      this.markerLayer.append(this.pendingEl);
    }
    const origin = this.origin();
    const p = project(lat, lon, this.zoom);
    this.pendingEl.style.left = `${p.x - origin.x}px`;
    this.pendingEl.style.top = `${p.y - origin.y}px`;
  }

  clearPending(): void {
    this.pendingEl?.remove();
    this.pendingEl = null;
  }
}
