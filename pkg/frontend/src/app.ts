/** Page wiring: map, search toolbar, resource list, and edit mode. */

import { Api } from './api.js';
import { PortalController } from './controller.js';
import { SlippyMap } from './map.js';
import { visibleResources, type UiState } from './types.js';

const POLL_INTERVAL_MS = 15_000;

function el<T extends HTMLElement>(id: string): T {
  const found = document.getElementById(id);
  if (!found) {
    throw new Error(`missing element #${id}`);
  }
  return found as T;
}

export async function boot(): Promise<void> {
  const api = new Api();
  let map: SlippyMap | null = null;
  let pending: { lat: number; lon: number } | null = null;

  const controller = new PortalController(api, render);
  await controller.loadMapConfig();
  const config = controller.state.mapConfig!;

  map = new SlippyMap(el('map'), config, {
    onMarkerClick(id) {
      controller.select(id);
      void api
        .popupHtml(id)
        .then((html) => map?.showPopup(id, html))
        .catch(() => map?.showPopup(id, '<p class="error">popup unavailable</p>'));
    },
    onMapClick(lat, lon) {
      if (controller.state.mode !== 'edit') {
        controller.select(null);
        map?.showPopup(null, '');
        return;
      }
      pending = { lat, lon };
      el<HTMLInputElement>('edit-lat').value = lat.toFixed(5);
      el<HTMLInputElement>('edit-lon').value = lon.toFixed(5);
      map?.showPending(lat, lon);
    },
  });
  map.renderTiles();

  function render(state: UiState): void {
    const visible = visibleResources(state);
    map?.renderMarkers(visible);

    const tbody = el<HTMLTableSectionElement>('resource-rows');
    tbody.replaceChildren();
    for (const entry of visible) {
      const tr = document.createElement('tr');
      tr.innerHTML = entry.list_row_html;
      if (entry.stale) {
        tr.classList.add('stale');
      }
      if (entry.resource.id === state.selectedId) {
        tr.classList.add('selected');
      }
      tr.addEventListener('click', () => {
        controller.select(entry.resource.id);
        populateEditForm(entry.resource.id);
      });
      tbody.append(tr);
    }
    el('no-results').hidden = !(state.filter !== '' && visible.length === 0);
    el('edit-panel').hidden = state.mode !== 'edit';
    el<HTMLButtonElement>('toggle-edit').textContent =
      state.mode === 'edit' ? 'Done editing' : 'Edit mode';
  }

  function populateEditForm(id: string): void {
    const entry = controller.state.resources.find((e) => e.resource.id === id);
    if (!entry) {
      return;
    }
    el<HTMLInputElement>('edit-lat').value = String(entry.resource.location.lat);
    el<HTMLInputElement>('edit-lon').value = String(entry.resource.location.lon);
  }

  el<HTMLInputElement>('search').addEventListener('input', (ev) => {
    void controller.setFilter((ev.target as HTMLInputElement).value.trim());
  });

  el<HTMLButtonElement>('toggle-edit').addEventListener('click', () => {
    if (controller.state.mode === 'edit') {
      controller.exitEditMode();
      pending = null;
      map?.clearPending();
    } else {
      controller.enterEditMode();
    }
  });

  el<HTMLButtonElement>('save-location').addEventListener('click', () => {
    const id = controller.state.selectedId;
    if (!id || !pending) {
      return;
    }
    void controller.saveLocation(id, pending).then(() => {
      pending = null;
      map?.clearPending();
    });
  });

  el<HTMLButtonElement>('cancel-location').addEventListener('click', () => {
    pending = null;
    map?.clearPending();
  });

  el<HTMLButtonElement>('save-map-config').addEventListener('click', () => {
    void controller.saveMapConfig({
      zoom: Number(el<HTMLInputElement>('cfg-zoom').value),
      allow_pan: el<HTMLInputElement>('cfg-pan').checked,
      allow_zoom: el<HTMLInputElement>('cfg-zoom-allowed').checked,
    });
  });

  await controller.refresh();
  setInterval(() => {
    if (controller.state.mode === 'display') {
      void controller.refresh().catch(() => {
        // a monitor or server hiccup must not break the UI; stale badges
        // arrive with the next successful poll
      });
    }
  }, POLL_INTERVAL_MS);
}

if (typeof document !== 'undefined' && document.getElementById('map')) {
  void boot();
}
