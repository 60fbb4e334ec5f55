// DOM wiring for the single-page client. No game math here: every number
// shown comes from the service.

import { ApiError, Client } from './api.js';
import type { BotPreset, Role, SessionView } from './api.js';
import {
    barWidths,
    decodeState,
    encodeState,
    formatProb,
    guessOptions,
    snapTheta,
    thetaGrid,
} from './model.js';

const client = new Client('');
const grid = thetaGrid();

let session: SessionView | null = null;
let roundInFlight = false;

function el<T extends HTMLElement>(id: string): T {
    const node = document.getElementById(id);
    if (!node) throw new Error(`missing element #${id}`);
    return node as T;
}

function showError(message: string): void {
    const box = el<HTMLDivElement>('error');
    box.textContent = message;
    box.hidden = message === '';
}

async function call<T>(work: Promise<T>): Promise<T | null> {
    try {
        const result = await work;
        showError('');
        return result;
    } catch (err) {
        showError(err instanceof ApiError ? err.body.message : String(err));
        return null;
    }
}

function currentTheta(): number {
    return grid[Number(el<HTMLInputElement>('theta-slider').value)];
}

function syncUrl(): void {
    const state = { theta: currentTheta(), sessionId: session?.id };
    history.replaceState(null, '', encodeState(state));
}

async function refreshThetaPanel(): Promise<void> {
    const theta = currentTheta();
    el<HTMLSpanElement>('theta-value').textContent = theta.toFixed(4);
    const sweep = await call(client.thetaSweep());
    const eq = await call(client.equilibrium(theta));
    if (!sweep || !eq) return;
    const nearest = sweep.reduce((best, p) =>
        Math.abs(p.theta - theta) < Math.abs(best.theta - theta) ? p : best,
    );
    for (const a of [0, 1]) {
        const widths = barWidths(nearest.p_alice[a]);
        const row = el<HTMLDivElement>(`bars-${a}`);
        row.innerHTML = '';
        nearest.p_alice[a].forEach((p, n) => {
            const bar = document.createElement('div');
            bar.className = 'bar';
            bar.style.width = `${widths[n]}%`;
            bar.textContent = `${n}: ${formatProb(p)}`;
            row.appendChild(bar);
        });
    }
    const badge = el<HTMLSpanElement>('purity-badge');
    badge.textContent = eq.purity;
    badge.className = `badge ${eq.purity}`;
}

function renderSession(): void {
    const panel = el<HTMLDivElement>('game-panel');
    if (!session) {
        panel.hidden = true;
        return;
    }
    panel.hidden = false;
    el<HTMLSpanElement>('score-human').textContent = String(session.score.human);
    el<HTMLSpanElement>('score-bot').textContent = String(session.score.bot);
    el<HTMLSpanElement>('score-draw').textContent = String(session.score.draw);

    const constraint = el<HTMLParagraphElement>('constraint-note');
    if (session.human_role === 'Bob' && session.alice_guess !== undefined) {
        constraint.textContent =
            `The bot guessed ${session.alice_guess}; that option is off-limits.`;
    } else {
        constraint.textContent = '';
    }

    const guessSelect = el<HTMLSelectElement>('guess');
    const keep = guessSelect.value;
    guessSelect.innerHTML = '';
    for (const option of guessOptions(session.total_coins, session.alice_guess)) {
        const node = document.createElement('option');
        node.value = String(option.value);
        node.textContent = String(option.value);
        node.disabled = option.disabled;
        guessSelect.appendChild(node);
    }
    if (keep && !guessSelect.querySelector(`option[value="${keep}"]:disabled`)) {
        guessSelect.value = keep;
    }

    const log = el<HTMLUListElement>('history');
    log.innerHTML = '';
    for (const round of [...session.history].reverse().slice(0, 12)) {
        const item = document.createElement('li');
        item.textContent =
            `total ${round.sampled_total}, guesses [${round.guesses}] - ${round.winner_side}`;
        log.appendChild(item);
    }
}

async function startSession(): Promise<void> {
    const role = el<HTMLSelectElement>('role').value as Role;
    const bot = el<HTMLSelectElement>('bot').value as BotPreset;
    const created = await call(client.createSession(currentTheta(), role, bot));
    if (!created) return;
    session = created;
    syncUrl();
    renderSession();
}

async function submitRound(): Promise<void> {
    if (!session || roundInFlight) return;
    roundInFlight = true;
    const button = el<HTMLButtonElement>('play');
    button.disabled = true;
    try {
        const coins = Number(el<HTMLSelectElement>('coins').value);
        const guess = Number(el<HTMLSelectElement>('guess').value);
        const result = await call(client.playRound(session.id, coins, guess));
        if (result) {
            el<HTMLDivElement>('last-total').textContent =
                `measured total: ${result.round.sampled_total} (${result.round.winner_side})`;
            session = await call(client.getSession(session.id));
            renderSession();
        }
    } finally {
        roundInFlight = false;
        button.disabled = false;
    }
}

async function runWhatIf(): Promise<void> {
    if (!session) return;
    const p0 = Number(el<HTMLInputElement>('whatif-mix').value) / 100;
    const mix = [p0, 1 - p0];
    const guess = Number(el<HTMLSelectElement>('whatif-guess').value);
    const result = await call(
        session.human_role === 'Alice'
            ? client.whatIfAlice(session.id, mix, guess)
            : client.whatIfBob(session.id, mix, [guess, guess]),
    );
    if (!result) return;
    el<HTMLDivElement>('whatif-result').textContent =
        `win ${formatProb(result.p_win)}, lose ${formatProb(result.p_lose)}, ` +
        `draw ${formatProb(result.p_draw)}`;
}

async function restore(): Promise<void> {
    const state = decodeState(location.hash);
    const slider = el<HTMLInputElement>('theta-slider');
    const index = grid.findIndex((t) => Math.abs(t - state.theta) < 1e-9);
    slider.value = String(index >= 0 ? index : Math.round(grid.length / 3));
    if (state.sessionId) {
        session = await call(client.getSession(state.sessionId));
        renderSession();
    }
    await refreshThetaPanel();
}

export function boot(): void {
    el<HTMLInputElement>('theta-slider').addEventListener('input', () => {
        void refreshThetaPanel();
        syncUrl();
    });
    el<HTMLInputElement>('theta-entry').addEventListener('change', (event) => {
        const typed = Number((event.target as HTMLInputElement).value);
        if (!Number.isFinite(typed)) return;
        const snapped = snapTheta(typed);
        const index = grid.findIndex((t) => Math.abs(t - snapped) < 1e-9);
        if (index >= 0) el<HTMLInputElement>('theta-slider').value = String(index);
        void refreshThetaPanel();
        syncUrl();
    });
    el<HTMLButtonElement>('start').addEventListener('click', () => void startSession());
    el<HTMLButtonElement>('play').addEventListener('click', () => void submitRound());
    el<HTMLButtonElement>('whatif-run').addEventListener('click', () => void runWhatIf());
    void restore();
}

if (typeof document !== 'undefined' && document.getElementById('theta-slider')) {
    boot();
}
