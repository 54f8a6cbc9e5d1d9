"""
Command line entry point: orbit-spec ingestion, command dispatch and the
JSON verification report.

    python -m weightlab.cli purity fixtures/j2xj2.json -K 1,2 -r 4
    python -m weightlab.cli all fixtures/j3.json --report out.json
    python -m weightlab.cli gen --tensor 2,2 --out fixtures/j2xj2.json
    python -m weightlab.cli sweep --corpus full

Exit codes: 0 every record passed, 1 some record failed, 2 input or resource error.
"""
import argparse
import hashlib
import json
from dataclasses import dataclass, field
from itertools import product

from . import __version__
from .complexes import (r_window, support_radius, subcomplex_check, exhaustion_check, euler_check,
                        omega_koszul_check, graded_weight, decomposition_check, purity_check, t_embedding_check,
                        kk_check, w_minus1_fiber_check, elementary_check, elementary_decomposition_check,
                        basic_lemma_check, support_box, hodge_check, mhc_shift_check)
from .constants import (SWEEP_CORPUS, MAX_SWEEP_DIM, MAX_SWEEP_INDICES, DEFAULT_SEED, PSI_MODES, DEFAULT_PSI_MODE,
                        PSI_MAX_INDICES)
from .errors import InputError, ContractError, ResourceError
from .orbit import NilpotentOrbit, validate, gen_jordan, gen_sl2_tensor, gen_conjugated
from .psi import (build_psi, psi_build_check, psi_decomposition_check, window_check, monodromy_weight_check,
                  ker_coker_bridge_check, a_complex_check, ker_nu_power_check, gamma_check)
from .qlinalg import LinMap, IncFiltration, canonicalize, dm_from_rows, qq_str, shift
from .scat import enumerate_chains, count_chains, simplicial_square_is_zero, product_iso
from .util.misc import CheckRecord, MetricLogger, all_passed, subsets
from .weightcore import (verify_weight_axioms, jordan_block_sizes, jordan_weight_dims, lambda_independence_check,
                         relative_checks, key_lemma_check, zassenhaus_check)

COMMANDS = ('weight', 'keylemma', 'omega', 'graded', 'purity', 'decompose', 'ic', 'psi-build', 'psi-monodromy',
            'psi-acyclic', 'elementary', 'hodge', 'gen', 'sweep', 'all')


def _int_list(text):
    try:
        return tuple(int(x) for x in text.split(',') if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f'expected comma separated integers, got {text!r}')


def get_args_parser():
    parser = argparse.ArgumentParser('weightlab', description='Weight filtrations, logarithmic complexes and '
                                                              'nearby cycles of nilpotent orbits')
    parser.add_argument('command', choices=COMMANDS)
    parser.add_argument('orbit_file', nargs='?', default=None, help='orbit-spec JSON document')

    # selection
    parser.add_argument('--subset', type=_int_list, default=None, help='index subset J, e.g. 1,2')
    parser.add_argument('-r', '--r', dest='r', type=int, default=None, help='weight index (default: the whole window)')
    parser.add_argument('-K', dest='K', type=_int_list, default=None, help='subset K, e.g. 1,2')
    parser.add_argument('--multiplicities', type=_int_list, default=None, help='n_i of f = prod z_i^{n_i}')
    parser.add_argument('--mode', default=DEFAULT_PSI_MODE, choices=PSI_MODES)
    parser.add_argument('--seed', default=DEFAULT_SEED, type=int)

    # output
    parser.add_argument('--report', default=None, type=str, help='write the JSON report here')
    parser.add_argument('--verbose', action='store_true')

    # test hook: perturb computed filtrations before verification
    parser.add_argument('--corrupt', action='store_true')

    # gen / sweep
    parser.add_argument('--jordan', type=_int_list, default=None, help='Jordan block sizes')
    parser.add_argument('--tensor', type=_int_list, default=None, help='sl2 factor sizes')
    parser.add_argument('--conjugate', action='store_true')
    parser.add_argument('--out', default=None, type=str)
    parser.add_argument('--corpus', default='small', choices=sorted(SWEEP_CORPUS))
    return parser


### orbit specs

def _parse_matrix(rows, dim, where):
    if not isinstance(rows, list) or len(rows) != dim or any(not isinstance(r, list) for r in rows):
        raise InputError(f'{where}: expected a {dim}x{dim} matrix')
    try:
        return LinMap(dm_from_rows(rows, dim))
    except InputError as e:
        raise InputError(f'{where}: {e}')


def _parse_vectors(vectors, dim, where):
    if not isinstance(vectors, list):
        raise InputError(f'{where}: expected a list of vectors')
    try:
        return canonicalize(dm_from_rows(vectors, dim), dim) if vectors else canonicalize([], dim)
    except InputError as e:
        raise InputError(f'{where}: {e}')


def parse_orbit(document):
    """Orbit-spec document (a dict) to a validated NilpotentOrbit.

    Malformed input raises InputError naming the location; a failed invariant
    raises ContractError listing every violation.
    """
    if not isinstance(document, dict):
        raise InputError('orbit spec must be an object')
    dim = document.get('dim')
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 0:
        raise InputError(f'dim: expected a natural number, got {dim!r}')
    mats = document.get('nilpotents')
    if not isinstance(mats, list):
        raise InputError('nilpotents: expected a list of matrices')
    nilpotents = tuple(_parse_matrix(m, dim, f'nilpotents[{k}]') for k, m in enumerate(mats))
    if not nilpotents and dim > 0:
        raise InputError('an orbit needs at least one nilpotent')
    weight = document.get('weight', 0)
    if not isinstance(weight, int) or isinstance(weight, bool):
        raise InputError(f'weight: expected an integer, got {weight!r}')

    hodge = None
    if document.get('hodge') is not None:
        raw = document['hodge']
        if not isinstance(raw, dict):
            raise InputError('hodge: expected a map from p to spanning vectors')
        try:
            steps = {int(p): _parse_vectors(v, dim, f'hodge[{p}]') for p, v in raw.items()}
        except ValueError:
            raise InputError('hodge: keys must be integers')
        hodge = IncFiltration(dim, steps, decreasing=True)

    pairing = None
    if document.get('pairing') is not None:
        pairing = _parse_matrix(document['pairing'], dim, 'pairing')

    multiplicities = document.get('multiplicities')
    if multiplicities is not None and (not isinstance(multiplicities, list)
                                       or any(not isinstance(x, int) or isinstance(x, bool) for x in multiplicities)):
        raise InputError('multiplicities: expected a list of positive integers')

    orbit = NilpotentOrbit(dim, nilpotents, weight=weight, hodge=hodge, pairing=pairing,
                           labels=document.get('labels'), multiplicities=multiplicities)
    failures = [r for r in validate(orbit) if not r.passed]
    if failures:
        raise ContractError('; '.join(f'{r.name}: {r.details}' for r in failures))
    return orbit


def _matrix_strings(f):
    return [[qq_str(x) for x in row] for row in f.rows()]


def orbit_to_spec(orbit):
    spec = {
        'dim': orbit.dim,
        'nilpotents': [_matrix_strings(N) for N in orbit.nilpotents],
        'weight': orbit.weight,
        'labels': list(orbit.labels),
    }
    if orbit.hodge is not None:
        spec['hodge'] = {str(p): [[qq_str(x) for x in v] for v in s.vectors()] for p, s in orbit.hodge.steps.items()}
    if orbit.pairing is not None:
        spec['pairing'] = _matrix_strings(orbit.pairing)
    if orbit.multiplicities is not None:
        spec['multiplicities'] = list(orbit.multiplicities)
    return spec


def digest(orbit):
    text = json.dumps(orbit_to_spec(orbit), sort_keys=True, separators=(',', ':'))
    return hashlib.sha256(text.encode('utf-8')).hexdigest()


def load_orbit(path):
    if path is None:
        raise InputError('an orbit file is required for this command')
    try:
        with open(path) as f:
            document = json.load(f)
    except FileNotFoundError:
        raise InputError(f'no such orbit file: {path}')
    except json.JSONDecodeError as e:
        raise InputError(f'{path}: not valid JSON ({e})')
    return parse_orbit(document)


### reports

@dataclass
class Report:
    command: str
    orbit_digest: str
    records: list = field(default_factory=list)

    def to_dict(self):
        return {
            'tool_version': __version__,
            'orbit_digest': self.orbit_digest,
            'command': self.command,
            'records': [r.to_dict() for r in self.records],
        }

    def dumps(self):
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    def exit_code(self):
        return 0 if all_passed(self.records) else 1


### command stages

class Context(object):
    """Per-run parameters plus the Psi complex shared by the psi stages."""

    def __init__(self, orbit, args):
        self.orbit = orbit
        self.args = args
        self._psi = None

    def subsets(self):
        if self.args.subset:
            return [self._check_subset(self.args.subset, '--subset')]
        return subsets(self.orbit.indices)

    def K(self):
        if self.args.K:
            return self._check_subset(self.args.K, '-K')
        return self.orbit.indices

    def _check_subset(self, J, flag):
        J = tuple(sorted(set(J)))
        if not J or not set(J) <= set(self.orbit.indices):
            raise InputError(f'{flag} {J} is not a nonempty subset of {self.orbit.indices}')
        return J

    def rs(self):
        window = r_window(self.orbit)
        if self.args.r is None:
            return window
        if self.args.r not in window:
            raise InputError(f'r = {self.args.r} is outside the window [{window[0]}, {window[-1]}]')
        return [self.args.r]

    def multiplicities(self):
        return self.orbit.get_multiplicities(self.args.multiplicities)

    def psi(self):
        if self._psi is None:
            self._psi = build_psi(self.orbit, self.multiplicities(), mode=self.args.mode, verbose=self.args.verbose)
        return self._psi


def stage_weight(ctx):
    orbit = ctx.orbit
    records = validate(orbit)
    for J in ctx.subsets():
        N = orbit.n_sum(J)
        W = orbit.w_multi(J)
        if ctx.args.corrupt:
            W = shift(W, 1)
        ok, witnesses = verify_weight_axioms(N, W)
        records.append(CheckRecord('weight.axioms', {'J': J}, ok,
                                   {'graded': W.graded_dims(), 'witnesses': witnesses[-3:]}))
        oracle = jordan_weight_dims(jordan_block_sizes(N))
        records.append(CheckRecord('weight.jordan_oracle', {'J': J}, W.graded_dims() == oracle,
                                   {'graded': W.graded_dims(), 'jordan': oracle}))
        if len(J) > 1:
            records.append(lambda_independence_check(orbit, J, seed=ctx.args.seed))
    for I in subsets(orbit.indices):
        for J in subsets([j for j in orbit.indices if j not in I]):
            records.extend(relative_checks(orbit, I, J))
    return records


def stage_keylemma(ctx):
    orbit = ctx.orbit
    A = ctx.subsets()[0] if ctx.args.subset else orbit.indices
    records = key_lemma_check(orbit, A, seed=ctx.args.seed)
    bad = []
    for B in subsets(A):
        for C in subsets([i for i in A if i not in B]):
            for b, c in product(orbit.w_multi(B).jumps(), orbit.w_multi(C).jumps()):
                ok, dims = zassenhaus_check(orbit, B, C, b, c)
                if not ok:
                    bad.append({'B': B, 'C': C, 'b': b, 'c': c, 'dims': dims})
    records.append(CheckRecord('keylemma.zassenhaus', {'A': A}, not bad, {'violations': bad}))
    return records


def stage_omega(ctx):
    orbit = ctx.orbit
    M = orbit.indices
    n_chains = len(enumerate_chains(M))
    records = [
        CheckRecord('scat.chain_count', {'n': orbit.n}, n_chains == count_chains(orbit.n),
                    {'enumerated': n_chains, 'formula': count_chains(orbit.n)}),
        CheckRecord('scat.simplicial', {'n': orbit.n}, simplicial_square_is_zero(M)),
    ]
    bad = []
    for K in subsets(M):
        try:
            product_iso(K, M)
        except AssertionError as e:
            bad.append({'K': K, 'error': str(e)})
    records.append(CheckRecord('scat.product_iso', {'n': orbit.n}, not bad, {'violations': bad}))
    records.extend(subcomplex_check(orbit))
    records.append(exhaustion_check(orbit))
    records.append(euler_check(orbit))
    records.append(omega_koszul_check(orbit))
    return records


def stage_graded(ctx):
    records = []
    for r in ctx.rs():
        prof = graded_weight(ctx.orbit, r).profile()
        records.append(CheckRecord('graded.profile', {'r': r}, r != 0 or prof.is_acyclic(),
                                   {'profile': prof.to_dict()}))
    return records


def stage_decompose(ctx):
    return [decomposition_check(ctx.orbit, r) for r in ctx.rs()]


def stage_purity(ctx):
    K = ctx.K()
    records = []
    for r in ctx.rs():
        records.append(purity_check(ctx.orbit, K, r))
        if r != 0:
            records.append(t_embedding_check(ctx.orbit, K, r))
    return records


def stage_ic(ctx):
    orbit = ctx.orbit
    records = kk_check(orbit)
    for K in subsets(orbit.indices):
        if K == orbit.indices:
            continue
        for r in ctx.rs():
            if r != 0:
                records.append(w_minus1_fiber_check(orbit, K, r))
    return records


def stage_elementary(ctx):
    orbit = ctx.orbit
    Ks = [ctx.K()] if ctx.args.K else [K for K in subsets(orbit.indices) if len(K) <= 3]
    records = []
    for K in Ks:
        for m in product(*support_box(orbit, K)):
            records.append(elementary_check(orbit, dict(zip(K, m))))
        for r in ctx.rs():
            records.append(elementary_decomposition_check(orbit, K, r))
            records.append(basic_lemma_check(orbit, K, r))
    return records


def stage_hodge(ctx):
    orbit = ctx.orbit
    if orbit.hodge is None:
        raise InputError('hodge needs an orbit with a Hodge filtration')
    records = []
    for k in ctx.rs():
        records.append(hodge_check(orbit, k))
        records.append(mhc_shift_check(orbit, k, 1, 1))
    return records


def stage_psi_build(ctx):
    psi = ctx.psi()
    records = psi_build_check(psi)
    for r in range(-psi.i0, psi.i0 + 1):
        records.append(psi_decomposition_check(psi, r))
        records.append(window_check(psi, r))
    return records


def stage_psi_monodromy(ctx):
    psi = ctx.psi()
    records = monodromy_weight_check(psi, verbose=ctx.args.verbose)
    for r in range(-psi.i0 - 1, psi.i0 + 2):
        records.append(ker_coker_bridge_check(psi, r))
    return records


def stage_psi_acyclic(ctx):
    orbit = ctx.orbit
    i0 = support_radius(orbit)
    records = []
    for i in range(1, i0 + 1):
        for K in subsets(orbit.indices):
            records.append(a_complex_check(orbit, K, i))
            if K != orbit.indices:
                records.append(a_complex_check(orbit, K, i, M=orbit.indices))
        records.append(ker_nu_power_check(orbit, i, ctx.multiplicities()))
    for K in subsets(orbit.indices):
        tops = [max(orbit.w_multi((k,)).jumps() or [0]) + 2 for k in K]
        for m in product(*[range(2, t + 1) for t in tops]):
            records.append(gamma_check(orbit, K, m))
    return records


STAGES = {
    'weight': [stage_weight],
    'keylemma': [stage_keylemma],
    'omega': [stage_omega],
    'graded': [stage_graded],
    'purity': [stage_purity],
    'decompose': [stage_decompose],
    'ic': [stage_ic],
    'psi-build': [stage_psi_build],
    'psi-monodromy': [stage_psi_monodromy],
    'psi-acyclic': [stage_psi_acyclic],
    'elementary': [stage_elementary],
    'hodge': [stage_hodge],
}


def _all_stages(orbit):
    stages = [stage_weight, stage_keylemma, stage_omega, stage_decompose, stage_purity, stage_ic, stage_elementary]
    if orbit.hodge is not None:
        stages.append(stage_hodge)
    if orbit.n <= PSI_MAX_INDICES:
        stages.extend([stage_psi_build, stage_psi_monodromy, stage_psi_acyclic])
    return stages


def run_command(command, orbit, args):
    """Run every stage of `command` on `orbit`; a violated contract inside a stage becomes a failed record."""
    if command not in STAGES and command != 'all':
        raise InputError(f'unknown command {command!r}')
    ctx = Context(orbit, args)
    stages = _all_stages(orbit) if command == 'all' else STAGES[command]
    records = []
    for stage in stages:
        try:
            records.extend(stage(ctx))
        except ContractError as e:
            records.append(CheckRecord(f'{stage.__name__[6:]}.error', {}, False, {'error': str(e)}))
    return Report(command, digest(orbit), records)


### corpus

def build_orbit(kind, sizes, seed=DEFAULT_SEED):
    if kind == 'jordan':
        return gen_jordan(sizes)
    if kind == 'tensor':
        return gen_sl2_tensor(sizes)
    if kind == 'conjugated_jordan':
        return gen_conjugated(gen_jordan(sizes), seed=seed)
    if kind == 'conjugated_tensor':
        return gen_conjugated(gen_sl2_tensor(sizes), seed=seed)
    raise InputError(f'unknown generator {kind!r}')


def build_corpus(name, seed=DEFAULT_SEED):
    if name not in SWEEP_CORPUS:
        raise InputError(f'unknown corpus {name!r}')
    corpus = []
    for kind, sizes in SWEEP_CORPUS[name]:
        orbit = build_orbit(kind, sizes, seed=seed)
        if orbit.dim > MAX_SWEEP_DIM or orbit.n > MAX_SWEEP_INDICES:
            raise ResourceError(f'{kind}{sizes} exceeds the sweep bounds (dim <= {MAX_SWEEP_DIM}, '
                                f'|M| <= {MAX_SWEEP_INDICES})')
        corpus.append((f'{kind}:{",".join(str(s) for s in sizes)}', orbit))
    return corpus


def sweep(args):
    """Run `all` on every orbit of the corpus and aggregate the records."""
    corpus = build_corpus(args.corpus, seed=args.seed)
    metric_logger = MetricLogger(delimiter='  ', verbose=True)
    records, digests = [], []
    for name, orbit in metric_logger.log_every(corpus, 1, header='sweep'):
        report = run_command('all', orbit, args)
        for r in report.records:
            r.parameters = dict(r.parameters, orbit=name)
        records.extend(report.records)
        digests.append(report.orbit_digest)
        metric_logger.update(failed=sum(1 for r in report.records if not r.passed), records=len(report.records))
    combined = hashlib.sha256(''.join(digests).encode('utf-8')).hexdigest()
    return Report('sweep', combined, records)


def gen(args):
    if bool(args.jordan) == bool(args.tensor):
        raise InputError('gen needs exactly one of --jordan or --tensor')
    orbit = build_orbit('jordan' if args.jordan else 'tensor', list(args.jordan or args.tensor))
    if args.conjugate:
        orbit = gen_conjugated(orbit, seed=args.seed)
    text = json.dumps(orbit_to_spec(orbit), sort_keys=True, indent=2)
    if args.out:
        with open(args.out, 'w') as f:
            f.write(text + '\n')
        print(f'wrote {args.out} (dim {orbit.dim}, {orbit.n} nilpotents)')
    else:
        print(text)
    return 0


def main(argv=None):
    parser = get_args_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code
    try:
        if args.command == 'gen':
            return gen(args)
        if args.command == 'sweep':
            report = sweep(args)
        else:
            orbit = load_orbit(args.orbit_file)
            report = run_command(args.command, orbit, args)
    except (InputError, ResourceError, ContractError) as e:
        print(f'error: {type(e).__name__}: {e}')
        return 2

    for record in report.records:
        print(record.summary())
    failed = sum(1 for r in report.records if not r.passed)
    print(f'{len(report.records)} records, {failed} failed')
    if args.report:
        with open(args.report, 'w') as f:
            f.write(report.dumps() + '\n')
    return report.exit_code()


if __name__ == '__main__':
    raise SystemExit(main())
