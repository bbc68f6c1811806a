EXIT_CONVERGED = 0
EXIT_VALIDATION_ERROR = 1
EXIT_NOT_CONVERGED = 2

SCENARIO_VERSION = 1

MEASURE_WEIGHT_TOL = 1e-12
SPATIAL_MERGE_TOL = 1e-12
PLAN_MARGINAL_TOL = 1e-10
MONOTONE_GAP_TOL = 1e-10
ASSUMPTION_SLACK_TOL = 1e-9
EIKONAL_TOL = 1e-6
CERTIFICATE_SLACK = 1e-6
HOLDER_PAIR_SLACK = 1e-9
TIE_TOL = 1e-6

FEASIBILITY_TOL_FACTOR = 1e-9
FD_STEP_FACTOR = 1e-5
CLOSEST_POINT_TOL_FACTOR = 1e-11
SUPPORT_MERGE_FACTOR = 1e-4
SUP_NORM_INFLATION = 0.05

INIT_CONSTANT = 'constant'
INIT_RANDOM = 'random'

DAMPING_HARMONIC = 'harmonic'
DAMPING_FIXED = 'fixed'

UNIQUENESS_PASSED = 'passed'
UNIQUENESS_FAILED = 'failed'
UNIQUENESS_SKIPPED_PRECONDITION = 'skipped_precondition'
UNIQUENESS_SKIPPED_NOT_CONVERGED = 'skipped_not_converged'

ARTIFACT_EQUILIBRIUM = 'equilibrium.json'
ARTIFACT_FLOW = 'flow.csv'
ARTIFACT_INITIAL_MEASURE = 'initial_measure.csv'
ARTIFACT_CERTIFICATE = 'certificate.json'
ARTIFACT_TRACE = 'trace.csv'
ARTIFACT_TIMINGS = 'timings.csv'
ARTIFACT_VALUE_GRID = 'value_grid.csv'
ARTIFACT_UNIQUENESS = 'uniqueness.json'
ARTIFACT_SCENARIO = 'scenario.json'

CSV_FLOAT_FORMAT = '%.17g'

TABLE_EQUILIBRIUM_RUNS = 'equilibrium_runs'
