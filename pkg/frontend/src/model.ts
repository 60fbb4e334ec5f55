// Pure view-model helpers: theta grid snapping, guess option lists, score
// bookkeeping and URL state. Kept DOM-free so they are unit-testable.

import type { RoundView, Score, SessionView } from './api.js';

export const GRID_POINTS = 34;
export const TWO_PI = 2 * Math.PI;

/** The slider's theta grid: 34 evenly spaced values over [0, 2*pi]. */
export function thetaGrid(points = GRID_POINTS): number[] {
    const out: number[] = [];
    for (let i = 0; i < points; i++) {
        out.push((TWO_PI * i) / (points - 1));
    }
    return out;
}

/** Snap a free-form theta to the nearest grid value. */
export function snapTheta(theta: number, points = GRID_POINTS): number {
    const clamped = Math.min(Math.max(theta, 0), TWO_PI);
    const step = TWO_PI / (points - 1);
    return Math.round(clamped / step) * step;
}

export interface GuessOption {
    value: number;
    disabled: boolean;
}

/**
 * Guess choices for the round form. When the human plays Bob the bot's
 * announced guess is forbidden and its option is disabled.
 */
export function guessOptions(
    totalCoins: number,
    forbidden?: number,
): GuessOption[] {
    const options: GuessOption[] = [];
    for (let n = 0; n <= totalCoins; n++) {
        options.push({ value: n, disabled: n === forbidden });
    }
    return options;
}

/** Score implied by a round history; must agree with the server's tally. */
export function scoreFromHistory(history: RoundView[]): Score {
    const score: Score = { human: 0, bot: 0, draw: 0 };
    for (const round of history) {
        score[round.winner_side] += 1;
    }
    return score;
}

export function scoreConsistent(view: SessionView): boolean {
    const derived = scoreFromHistory(view.history);
    return (
        derived.human === view.score.human &&
        derived.bot === view.score.bot &&
        derived.draw === view.score.draw &&
        view.rounds_played === view.history.length
    );
}

export interface UrlState {
    sessionId?: string;
    theta: number;
}

/** Session id and theta live in the URL so games are shareable/resumable. */
export function encodeState(state: UrlState): string {
    const params = new URLSearchParams();
    params.set('theta', state.theta.toFixed(6));
    if (state.sessionId) params.set('session', state.sessionId);
    return '#' + params.toString();
}

export function decodeState(hash: string): UrlState {
    const params = new URLSearchParams(hash.replace(/^#/, ''));
    const theta = Number(params.get('theta'));
    return {
        sessionId: params.get('session') ?? undefined,
        theta: Number.isFinite(theta) ? snapTheta(theta) : snapTheta(TWO_PI / 3),
    };
}

/** Display label for a probability, rounded for bar captions. */
export function formatProb(p: number): string {
    return (100 * p).toFixed(1) + '%';
}

/** Bar widths for one coin count's outcome distribution; sums to ~100. */
export function barWidths(probs: number[]): number[] {
    return probs.map((p) => Math.max(0, Math.min(100, 100 * p)));
}
