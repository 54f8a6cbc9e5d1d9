import pathlib

### Tool
TOOL_VERSION = '0.3.0'
FIXTURE_DIR = str(pathlib.Path(__file__).parent.parent / 'fixtures')

### Combinatorial guards
MAX_CHAIN_SET = 6          # |M| above this raises ResourceError in scat
MAX_SWEEP_DIM = 32
MAX_SWEEP_INDICES = 3

### Key lemma permutations
EXHAUSTIVE_PERMUTATIONS = 4   # all |A|! orders up to this size
RANDOM_PERMUTATIONS = 10      # random orders beyond it

### Windows
WINDOW_MARGIN = 2    # r ranges over [-(i0 + margin), i0 + margin]
DEFAULT_SEED = 0

### Psi
PSI_MODES = ('cokernel', 'kernel')
DEFAULT_PSI_MODE = 'cokernel'

### Sweep corpora
# each entry is a list of (generator, argument) pairs understood by cli.build_corpus
SWEEP_CORPUS = {
    'jordan': [
        ('jordan', [2]),
        ('jordan', [3]),
        ('jordan', [2, 1]),
    ],
    'tensor': [
        ('tensor', [2, 2]),
        ('tensor', [2, 3]),
        ('tensor', [2, 2, 2]),
    ],
    'conjugated': [
        ('conjugated_jordan', [3, 1]),
        ('conjugated_tensor', [2, 2]),
    ],
    'small': [
        ('jordan', [2]),
        ('jordan', [3]),
        ('tensor', [2, 2]),
    ],
}
SWEEP_CORPUS['full'] = SWEEP_CORPUS['jordan'] + SWEEP_CORPUS['tensor'] + SWEEP_CORPUS['conjugated']

# checks run by `all`; psi checks up to this many indices
PSI_MAX_INDICES = 3
