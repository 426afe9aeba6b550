"""
Tests for the config module
"""
import json

import numpy as np
import pytest

from measfem.config import (PRESETS, DomainSpec, ExperimentConfig, MeasureSpec, PointSpec,
                            dump_config, load_config, preset)
from measfem.errors import ConfigError
from measfem.measures import MeasureData


def test_example1():
    config = preset('example1')
    assert config.domain == DomainSpec('lshape', n=4)
    assert config.measure.points[0].x == (-0.5, 0.5)
    assert config.levels == (0, 4) and config.reference_level == 6
    names = [r.name for r in config.regions]
    assert names == ['Omega', 'Omega\\B1', 'Omega\\B2', 'B3']
    assert config.regions[1].radius == pytest.approx(1 / 6.)
    assert config.regions[2].radius == pytest.approx(1 / 10.)
    assert config.regions[3].kind == 'ball' and config.regions[3].center == (0.0, 0.0)
    assert config.output.csv == 'example1_p1.csv'


def test_example2():
    config = preset('example2', 3)
    assert config.degree == 3
    assert config.domain.kind == 'hexagon'
    assert config.build_mesh().n_cells == 24
    assert config.measure.points[0].x == (0.0, 0.0)
    # the point source is a vertex of the initial mesh
    assert np.any(np.all(config.build_mesh().vertices == 0.0, axis=1))
    v6 = config.regions[3].center
    assert np.allclose(v6, (-1 / np.sqrt(3) - 0.1, 0.0))


def test_example3():
    config = preset('example3')
    assert [c.w for c in config.measure.curves] == [1.6, 0.8, 1.2]
    assert [c.curve for c in config.measure.curves] == ['lambda1', 'lambda2', 'lambda3']
    assert config.levels == (0, 3) and config.reference_level == 5
    assert config.regions[1].center == (0.5, 0.5, 0.5)
    assert [r.radius for r in config.regions[1:]] == [0.3, 0.4]
    assert preset('example3', 2).reference_level == 4


def test_calibration():
    config = preset('calibration', 2)
    assert config.oracle == 'exact'
    assert config.levels == (1, 5)
    assert config.measure.is_smooth
    # a tolerance CG reaches on the level-5 P2 and P3 systems
    assert config.solver_tol == 1e-10
    source = config.build_data()
    assert callable(source)
    assert np.isclose(source(np.array([[0.5, 0.5]]))[0], 2 * np.pi ** 2)


def test_build_data_resolves_curves():
    mu = preset('example1').build_data()
    assert isinstance(mu, MeasureData)
    assert mu.total_mass() == 1.0

    mu = preset('example3').build_data()
    assert [a.weight for a in mu.curve_atoms] == [1.6, 0.8, 1.2]
    for atom in mu.curve_atoms:
        assert atom.n_segments > 512
        assert atom.params[0] == 0.0 and np.isclose(atom.params[-1], 0.4)


def test_unknown_preset():
    with pytest.raises(ValueError):
        preset('example4')
    with pytest.raises(ValueError):
        preset('example1', 4)
    assert sorted(PRESETS) == ['calibration', 'example1', 'example2', 'example3']


@pytest.mark.parametrize('name', sorted(PRESETS))
def test_presets_round_trip(name, tmpdir):
    config = preset(name)
    path = str(tmpdir.join(name + '.json'))
    dump_config(config, path)
    assert load_config(path) == config
    assert ExperimentConfig.from_dict(json.loads(dump_config(config))) == config


def test_explicit_polyline_round_trip(tmpdir):
    data = {
        'name': 'segment',
        'domain': {'kind': 'cube', 'n': 2},
        'degree': [1, 2],
        'levels': [0, 1],
        'reference_level': 3,
        'measure': {'curves': [{'curve': [[0.0, 0.2, 0.5, 0.5], [1.0, 0.8, 0.5, 0.5]],
                                'w': 2.0}],
                    'total_variation': 1.2},
        'regions': [{'name': 'Omega'},
                    {'name': 'outer', 'kind': 'ball_complement',
                     'center': [0.5, 0.5, 0.5], 'radius': 0.25}],
        'norms': ['L2'],
    }
    config = ExperimentConfig.from_dict(data)
    assert config.degrees == (1, 2)
    assert config.norms == ('L2',)
    assert ExperimentConfig.from_dict(config.to_dict()) == config

    mu = config.build_data()
    atom = mu.curve_atoms[0]
    assert np.allclose(atom.points, [[0.2, 0.5, 0.5], [0.8, 0.5, 0.5]])
    assert atom.weight == 2.0
    assert mu.total_variation() == 1.2
    regions = config.build_regions()
    assert regions[1].kind == 'ball_complement'


def test_with_overrides():
    config = preset('example1')
    changed = config.with_overrides(levels=(1, 3), scheme=None, degrees=(2,))
    assert changed.levels == (1, 3)
    assert changed.scheme == config.scheme
    assert changed.degree == 2
    assert config.levels == (0, 4)
    with pytest.raises(ConfigError) as info:
        config.with_overrides(levels=(0, 6))
    assert info.value.field == 'reference_level'


def error_field(data):
    with pytest.raises(ConfigError) as info:
        ExperimentConfig.from_dict(data)
    return info.value.field


def base():
    return {'domain': {'kind': 'lshape', 'n': 2},
            'measure': {'points': [{'x': [-0.5, 0.5]}]},
            'reference_level': 5}


def test_validation_names_the_field():
    assert ExperimentConfig.from_dict(base()).name == 'experiment'

    cases = [
        ({'degree': 4}, 'degree[0]'),
        ({'degree': True}, 'degree'),
        ({'scheme': 'mixed'}, 'scheme'),
        ({'oracle': 'exact'}, 'oracle'),
        ({'levels': [2, 1]}, 'levels[1]'),
        ({'levels': 'all'}, 'levels'),
        ({'reference_level': 4}, 'reference_level'),
        ({'reference_level': None}, 'reference_level'),
        ({'norms': ['Linf']}, 'norms[0]'),
        ({'solver_tol': 0}, 'solver_tol'),
        ({'solver_tol': 'tight'}, 'solver_tol'),
        ({'colour': 'blue'}, 'colour'),
        ({'domain': {'kind': 'disk', 'n': 2}}, 'domain.kind'),
        ({'domain': {'kind': 'lshape'}}, 'domain.n'),
        ({'domain': {'kind': 'hexagon', 'n': 3}}, 'domain.n'),
        ({'domain': {'kind': 'cube', 'n': 2, 'pre_refinements': 1}}, 'domain.pre_refinements'),
        ({'measure': {}}, 'measure'),
        ({'measure': {'points': [{'x': [0.5]}]}}, 'measure.points[0].x'),
        ({'measure': {'points': [{'w': 1.0}]}}, 'measure.points[0].x'),
        ({'measure': {'points': [{'x': ['a', 0.5]}]}}, 'measure.points[0].x[0]'),
        ({'measure': {'curves': [{'curve': 'lambda9'}]}}, 'measure.curves[0].curve'),
        ({'measure': {'curves': [{'curve': [[0.0, 0.1, 0.1]]}]}}, 'measure.curves[0].curve'),
        ({'measure': {'curves': [{'curve': 'lambda1', 'samples': 1}]}},
         'measure.curves[0].samples'),
        ({'measure': {'smooth': 'cosine'}}, 'measure.smooth'),
        ({'regions': []}, 'regions'),
        ({'regions': [{'name': 'a'}, {'name': 'a'}]}, 'regions'),
        ({'regions': [{'name': 'b', 'kind': 'ball', 'radius': 0.1}]}, 'regions[0].center'),
        ({'regions': [{'name': 'b', 'kind': 'ball', 'center': [0, 0], 'radius': -1}]},
         'regions[0].radius'),
        ({'regions': [{'name': 'b', 'kind': 'cube'}]}, 'regions[0].kind'),
        ({'output': []}, 'output'),
    ]
    for change, field in cases:
        data = base()
        data.update(change)
        assert error_field(data) == field, change

    assert error_field([]) == '<root>'
    data = base()
    del data['domain']
    assert error_field(data) == 'domain'


def test_exact_oracle_needs_smooth_source():
    data = base()
    data.update({'measure': {'smooth': 'sine'}, 'oracle': 'exact',
                 'domain': {'kind': 'unit_square', 'n': 2}})
    del data['reference_level']
    config = ExperimentConfig.from_dict(data)
    assert config.reference_level is None
    with pytest.raises(ConfigError):
        MeasureSpec(points=(PointSpec((0.5, 0.5)),), smooth='sine')


def test_load_config_errors(tmpdir):
    with pytest.raises(ConfigError) as info:
        load_config(str(tmpdir.join('missing.json')))
    assert info.value.field.endswith('missing.json')

    path = tmpdir.join('broken.json')
    path.write('{\n  "name": "x",\n  "domain": \n}\n')
    with pytest.raises(ConfigError) as info:
        load_config(str(path))
    assert info.value.field == '{0}: line 4, column 1'.format(path)


def test_specs_compare_by_value():
    config = preset('example1')
    again = preset('example1')
    assert config == again and config is not again
    assert hash(config) == hash(again)
    assert config != preset('example1', 2)
    assert config.domain != DomainSpec('lshape', n=5)
    assert len({config.domain, DomainSpec('lshape', n=4)}) == 1

    # sequences are stored as tuples
    point = PointSpec([0.1, 0.2])
    assert point == PointSpec((0.1, 0.2))
    assert config.with_overrides(levels=[1, 2]).levels == (1, 2)
    assert repr(point) == 'PointSpec(x=(0.1, 0.2), w=1.0)'
    assert repr(config.domain).startswith("DomainSpec(kind='lshape', n=4")


def test_replace_validates():
    domain = DomainSpec('cube', n=2)
    assert domain.replace(n=3) == DomainSpec('cube', n=3)
    assert domain.n == 2
    with pytest.raises(ConfigError) as info:
        domain.replace(pre_refinements=2)
    assert info.value.field == 'domain.pre_refinements'
