import json
import os
import sys

import pytest

# Get path to root directory (two levels up from tests/)
path_to_root = os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))
sys.path += [path_to_root]

from weightlab.cli import (main, load_orbit, parse_orbit, orbit_to_spec, digest, build_corpus, _all_stages,
                           stage_psi_build, stage_psi_monodromy, stage_psi_acyclic)
from weightlab.constants import FIXTURE_DIR
from weightlab.errors import ContractError, InputError
from weightlab.orbit import gen_jordan, gen_sl2_tensor


def fixture(name):
    return os.path.join(FIXTURE_DIR, name)


# Test 1: orbit specs load and round trip
def test_fixtures_load():
    orbit = load_orbit(fixture('zero.json'))
    assert orbit.dim == 1 and orbit.n == 1
    with open(fixture('j2xj2.json')) as f:
        document = json.load(f)
    orbit = parse_orbit(document)
    assert orbit_to_spec(orbit) == document
    assert digest(orbit) == digest(gen_sl2_tensor([2, 2]))
    assert digest(load_orbit(fixture('j2.json'))) == digest(gen_jordan([2]))


# Test 2: malformed and invalid specs
def test_bad_specs():
    with pytest.raises(InputError):
        load_orbit(fixture('bad_rational.json'))
    with pytest.raises(ContractError):
        load_orbit(fixture('noncommuting.json'))
    with pytest.raises(InputError):
        parse_orbit({'dim': 2, 'nilpotents': [[[0, 1]]]})
    with pytest.raises(InputError):
        parse_orbit({'dim': -1, 'nilpotents': []})
    with pytest.raises(InputError):
        load_orbit(fixture('missing.json'))


# Test 3: commands that hold exit with 0
@pytest.mark.parametrize('argv', [
    ['purity', 'j2xj2.json', '-K', '1,2', '-r', '4'],
    ['graded', 'j3.json', '-r', '0'],
    ['weight', 'j2xj2.json'],
    ['psi-monodromy', 'j2.json', '--multiplicities', '1'],
])
def test_commands_pass(argv):
    argv = [argv[0], fixture(argv[1])] + argv[2:]
    assert main(argv) == 0


# Test 4: input errors exit with 2, failed records with 1
def test_exit_codes():
    assert main(['weight', fixture('noncommuting.json')]) == 2
    assert main(['weight', fixture('bad_rational.json')]) == 2
    assert main(['frobnicate', fixture('j2.json')]) == 2
    assert main(['graded', fixture('j3.json'), '-r', '50']) == 2
    assert main(['purity', fixture('j2.json'), '-K', '3']) == 2
    assert main(['weight', fixture('j2.json'), '--corrupt']) == 1


# Test 5: reports are byte-for-byte deterministic
def test_report_is_deterministic(tmp_path):
    paths = [str(tmp_path / 'a.json'), str(tmp_path / 'b.json')]
    for path in paths:
        assert main(['decompose', fixture('j2xj2.json'), '--report', path]) == 0
    with open(paths[0]) as fa, open(paths[1]) as fb:
        a, b = fa.read(), fb.read()
    assert a == b
    report = json.loads(a)
    assert report['command'] == 'decompose'
    assert report['orbit_digest'] == digest(gen_sl2_tensor([2, 2]))
    assert all(r['passed'] for r in report['records'])


# Test 6: gen writes a spec that loads back to the same orbit
def test_gen(tmp_path):
    out = str(tmp_path / 'j2.json')
    assert main(['gen', '--jordan', '2', '--out', out]) == 0
    assert digest(load_orbit(out)) == digest(load_orbit(fixture('j2.json')))
    assert main(['gen']) == 2


# Test 7: corpora stay inside the sweep bounds
def test_build_corpus():
    names = [name for name, _ in build_corpus('small')]
    assert names == ['jordan:2', 'jordan:3', 'tensor:2,2']
    with pytest.raises(InputError):
        build_corpus('nope')


# Test 8: the small sweep passes end to end
@pytest.mark.integration
def test_sweep_small(tmp_path):
    path = str(tmp_path / 'sweep.json')
    assert main(['sweep', '--corpus', 'small', '--report', path]) == 0
    with open(path) as f:
        report = json.load(f)
    assert report['command'] == 'sweep'
    assert {r['parameters']['orbit'] for r in report['records']} == {'jordan:2', 'jordan:3', 'tensor:2,2'}


# Test 9: an orbit with no nilpotents is rejected before any check runs
def test_orbit_without_nilpotents():
    with pytest.raises(InputError, match='at least one nilpotent'):
        load_orbit(fixture('no_nilpotents.json'))
    for command in ('omega', 'psi-build', 'purity', 'all'):
        assert main([command, fixture('no_nilpotents.json')]) == 2


# Test 10: `all` schedules the psi stages for every orbit of the full corpus
def test_all_includes_psi_stages():
    corpus = build_corpus('full')
    assert 'tensor:2,2,2' in [name for name, _ in corpus]
    for _, orbit in corpus:
        stages = _all_stages(orbit)
        assert {stage_psi_build, stage_psi_monodromy, stage_psi_acyclic} <= set(stages)
