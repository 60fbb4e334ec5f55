// Typed client over the play-service JSON API. All game math lives server
// side; this module only shuttles requests and narrows response shapes.

export type Role = 'Alice' | 'Bob';
export type BotPreset = 'random-rational' | 'stable' | 'nash';

export interface Score {
    human: number;
    bot: number;
    draw: number;
}

export interface RoundView {
    coins: number[];
    guesses: number[];
    sampled_total: number;
    winner_side: 'human' | 'bot' | 'draw';
}

export interface SessionView {
    id: string;
    theta: number;
    total_coins: number;
    coins_per_player: number;
    human_role: Role;
    bot: BotPreset;
    seed: string;
    rounds_played: number;
    score: Score;
    history: RoundView[];
    alice_guess?: number;
}

export interface RoundResult {
    round: RoundView;
    score: Score;
    rounds_played: number;
    alice_guess?: number;
}

export interface WhatIfResult {
    p_win: number;
    p_lose: number;
    p_draw: number;
}

export interface SweepPoint {
    theta: number;
    p_alice: number[][];
}

export interface EquilibriumView {
    theta: number;
    p_alice: number;
    p_bob: number;
    p_draw: number;
    purity: 'pure' | 'mixed';
}

export interface ApiErrorBody {
    code: string;
    message: string;
    field?: string;
}

export class ApiError extends Error {
    constructor(
        public readonly status: number,
        public readonly body: ApiErrorBody,
    ) {
        super(body.message);
    }
}

type Fetch = typeof fetch;

export class Client {
    constructor(
        private readonly base: string = '',
        private readonly fetchImpl: Fetch = fetch,
    ) {}

    private async request<T>(path: string, init?: RequestInit): Promise<T> {
        const response = await this.fetchImpl(this.base + path, init);
        const body = await response.json();
        if (!response.ok) {
            throw new ApiError(response.status, body as ApiErrorBody);
        }
        return body as T;
    }

    private post<T>(path: string, payload: unknown): Promise<T> {
        return this.request<T>(path, {
            method: 'POST',
            headers: { 'Content-Type': 'application/json' },
            body: JSON.stringify(payload),
        });
    }

    createSession(
        theta: number,
        humanRole: Role,
        bot: BotPreset,
        seed?: number,
    ): Promise<SessionView> {
        const payload: Record<string, unknown> = {
            theta,
            human_role: humanRole,
            bot,
        };
        if (seed !== undefined) payload.seed = seed;
        return this.post('/api/sessions', payload);
    }

    getSession(id: string): Promise<SessionView> {
        return this.request(`/api/sessions/${id}`);
    }

    playRound(id: string, coins: number, guess: number): Promise<RoundResult> {
        return this.post(`/api/sessions/${id}/rounds`, { coins, guess });
    }

    whatIfAlice(id: string, mix: number[], guess: number): Promise<WhatIfResult> {
        return this.post(`/api/sessions/${id}/whatif`, { mix, guess });
    }

    whatIfBob(id: string, mix: number[], guesses: number[]): Promise<WhatIfResult> {
        return this.post(`/api/sessions/${id}/whatif`, { mix, guesses });
    }

    thetaSweep(points = 34): Promise<SweepPoint[]> {
        return this.request(`/api/theta-sweep?points=${points}`);
    }

    equilibrium(theta: number): Promise<EquilibriumView> {
        return this.request(`/api/equilibrium?theta=${theta}`);
    }
}
