from typing import Dict, Any


class SolverDefaults:
    DEFAULT_MULTISTART_COUNT = 4
    DEFAULT_BR_MAX_ITERS = 400
    DEFAULT_GRADIENT_TOL = 1e-6
    DEFAULT_ARMIJO = 1e-4
    DEFAULT_BACKTRACK_FACTOR = 0.5
    DEFAULT_MAX_BACKTRACKS = 30
    DEFAULT_MAX_STEP = 1e4
    DEFAULT_PERTURBATION_SCALE = 0.05
    DEFAULT_FEASIBILITY_TOL = None
    DEFAULT_RESTART_INTERVAL = 10

    DEFAULT_MAX_OUTER_ITERS = 200
    DEFAULT_EXPLOITABILITY_TOL = 1e-3
    DEFAULT_DAMPING = 'harmonic'
    DEFAULT_FIXED_ALPHA = 0.5
    DEFAULT_ATOM_SPLITTING = False
    DEFAULT_INITIALIZATION = 'constant'
    DEFAULT_SUPPORT_MERGE_TOL = None

    DEFAULT_VALUE_GRID_RESOLUTION = 33
    DEFAULT_VALUE_MULTISTART_COUNT = 2
    DEFAULT_SUP_NORM_RESOLUTION = 64
    DEFAULT_ASSUMPTION_SAMPLES = 2000
    DEFAULT_ASSUMPTION_V_MAX = 50.0
    DEFAULT_MONOTONE_PROBE_PAIRS = 20

    DEFAULT_UNIQUENESS_U_TOL = 5e-3
    DEFAULT_UNIQUENESS_GAP_TOL = 1e-4

    @staticmethod
    def get_best_response_defaults() -> Dict[str, Any]:
        return {
            'multistart_count': SolverDefaults.DEFAULT_MULTISTART_COUNT,
            'max_iters': SolverDefaults.DEFAULT_BR_MAX_ITERS,
            'gradient_tol': SolverDefaults.DEFAULT_GRADIENT_TOL,
            'armijo': SolverDefaults.DEFAULT_ARMIJO,
            'backtrack_factor': SolverDefaults.DEFAULT_BACKTRACK_FACTOR,
            'max_backtracks': SolverDefaults.DEFAULT_MAX_BACKTRACKS,
            'max_step': SolverDefaults.DEFAULT_MAX_STEP,
            'perturbation_scale': SolverDefaults.DEFAULT_PERTURBATION_SCALE,
            'feasibility_tol': SolverDefaults.DEFAULT_FEASIBILITY_TOL,
        }

    @staticmethod
    def get_solver_defaults() -> Dict[str, Any]:
        return {
            'max_outer_iters': SolverDefaults.DEFAULT_MAX_OUTER_ITERS,
            'exploitability_tol': SolverDefaults.DEFAULT_EXPLOITABILITY_TOL,
            'damping': SolverDefaults.DEFAULT_DAMPING,
            'fixed_alpha': SolverDefaults.DEFAULT_FIXED_ALPHA,
            'atom_splitting': SolverDefaults.DEFAULT_ATOM_SPLITTING,
            'initialization': SolverDefaults.DEFAULT_INITIALIZATION,
            'restart_interval': SolverDefaults.DEFAULT_RESTART_INTERVAL,
            'support_merge_tol': SolverDefaults.DEFAULT_SUPPORT_MERGE_TOL,
        }
