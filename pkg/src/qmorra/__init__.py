"""Deformed quantum Morra: operators, game mechanics, equilibrium search,
two-qubit embedding, circuit synthesis and photonic-setup fitting."""

from .core import (
    GameConfig,
    DimensionError,
    NormalizationError,
    coin_coefficient,
    coin_coefficients,
    coin_state,
    deformed_x,
    deformed_z,
    fourier,
    outcome_distribution,
)
from .game import (
    DRAW,
    Move,
    RoundRecord,
    RuleError,
    alice_average_prob,
    make_rng,
    play_round,
    round_distribution,
    sample_totals,
    validate_moves,
)
from .strategies import (
    AliceStrategy,
    BobStrategy,
    EquilibriumResult,
    StrategyError,
    alice_win_prob,
    best_response_alice,
    best_response_bob,
    bob_win_prob,
    draw_prob,
    find_equilibrium,
    outcome_table,
    purity_boundaries,
    purity_region_scan,
)
from .qubitmap import (
    SINGLET,
    basis_change_v,
    embed_qutrit,
    entanglement_entropy,
    qubit_count,
    x4,
    x_theta_two_qubit,
)
from .circuits import (
    CircuitTemplate,
    SynthesisError,
    SynthesisReport,
    distance,
    fit_three_cnot,
    fixed_two_cnot_circuit,
    synthesize,
    three_cnot_template,
    two_cnot_feasible,
    verify_circuit,
)
from .optics import (
    FitResult,
    WaveplateConfig,
    fit_cost,
    fit_waveplates,
    hellinger_fidelity,
    hwp_jones,
    simulate_setup,
)

__version__ = "0.1.0"
