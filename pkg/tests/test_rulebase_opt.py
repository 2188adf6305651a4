import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from wppfuzzy.errors import CapacityError, ConfigError, DimensionError, ObjectiveError
from wppfuzzy.fuzzy import make_variable
from wppfuzzy.inference import FuzzyRule, RuleBase
from wppfuzzy.pso import PsoParams
from wppfuzzy.rulebase_opt import (Candidate, CutoffPolicy, ModelTarget, apply_weights, distance_evaluator,
                                   generate_noisy_base, model_distance, optimize_rulebase, scenario_evaluator)
from wppfuzzy.wpp import ALPHA, DL, DPSI, PSI, U0

from oracles import exact_distance

CUT = CutoffPolicy(0.5)


def test_apply_all_ones(model):
    out = apply_weights(model, [1.0] * 16, CUT)
    assert out == model


def test_apply_all_zeros(model):
    assert len(apply_weights(model, [0.0] * 16, CUT)) == 0


def test_apply_hand_example(model):
    base = model.with_rules(model.rules[:3])
    out = apply_weights(base, (0.9, 0.4, 0.6), CUT)
    assert [r.key for r in out.rules] == [base.rules[0].key, base.rules[2].key]
    assert [r.weight for r in out.rules] == [0.9, 0.6]
    assert [r.weight for r in base.rules] == [1.0, 1.0, 1.0]


def test_apply_keeps_weight_at_cutoff(model):
    out = apply_weights(model.with_rules(model.rules[:2]), (0.5, np.nextafter(0.5, 0)), CUT)
    assert [r.weight for r in out.rules] == [0.5]


def test_apply_errors(model):
    with pytest.raises(DimensionError):
        apply_weights(model, [1.0] * 15, CUT)
    with pytest.raises(ConfigError):
        apply_weights(model, [1.1] + [1.0] * 15, CUT)


@given(st.lists(st.floats(0, 1), min_size=16, max_size=16))
def test_apply_preserves_order(model, w):
    out = apply_weights(model, w, CUT)
    idx = [i for i, wi in enumerate(w) if wi >= 0.5]
    assert [r.key for r in out.rules] == [model.rules[i].key for i in idx]
    assert [r.weight for r in out.rules] == [w[i] for i in idx]


@pytest.mark.parametrize("b", [0.0, 1.0, -0.1, 1.5])
def test_cutoff_validation(b):
    with pytest.raises(ConfigError):
        CutoffPolicy(b)


def test_target_validation():
    with pytest.raises(ConfigError):
        ModelTarget((1, 0.5))
    assert ModelTarget((1, 0, 1)).ones == 2


def test_distance_examples():
    t = ModelTarget((1, 0, 1))
    assert model_distance((1.0, 0.0, 1.0), t, CUT) == 0.0
    assert model_distance((0.9, 0.4, 0.6), t, CUT) == 0.5
    assert model_distance((0.9, 0.4, 0.6), t, CUT) == exact_distance((0.9, 0.4, 0.6), (1, 0, 1), 0.5)
    big = ModelTarget((1.0,) * 16 + (0.0,) * 184)
    assert model_distance(np.ones(200), big, CUT) == 184.0


def test_distance_errors():
    with pytest.raises(DimensionError):
        model_distance([1.0, 1.0], ModelTarget((1,)), CUT)
    with pytest.raises(ConfigError):
        model_distance([1.5], ModelTarget((1,)), CUT)


weights_targets = st.integers(1, 30).flatmap(lambda m: st.tuples(
    st.lists(st.floats(0, 1), min_size=m, max_size=m),
    st.lists(st.sampled_from([0.0, 1.0]), min_size=m, max_size=m),
    st.floats(0.01, 0.99),
))


@given(weights_targets)
def test_distance_matches_exact(args):
    w, t, b = args
    assert model_distance(w, ModelTarget(tuple(t)), CutoffPolicy(b)) == exact_distance(w, t, b)


@given(weights_targets)
def test_distance_bounds(args):
    w, t, b = args
    target, cut = ModelTarget(tuple(t)), CutoffPolicy(b)
    assert 0.0 <= model_distance(w, target, cut) <= len(w)
    assert model_distance([0.0] * len(w), target, cut) == target.ones


def test_zero_iff_exact_model_brute_force(model):
    grid = [0.0, 0.25, 0.5, 0.75, 1.0]
    base = model.with_rules(model.rules[:3])
    for t in itertools.product([0.0, 1.0], repeat=3):
        target = ModelTarget(t)
        wanted = [base.rules[i].key for i in range(3) if t[i] == 1.0]
        for w in itertools.product(grid, repeat=3):
            kept = apply_weights(base, w, CUT)
            exact = [r.key for r in kept.rules] == wanted and all(r.weight == 1.0 for r in kept.rules)
            assert (model_distance(w, target, CUT) == 0.0) == exact


def test_candidate_is_lazy(model):
    c = Candidate(model, np.array([1.0, 0.2] * 8), CUT)
    assert c.kept.tolist() == list(range(0, 16, 2))
    assert "base" not in c.__dict__
    assert len(c.base) == 8


def test_degenerate_model_only(model):
    target = ModelTarget((1.0,) * 16)
    base1, res = optimize_rulebase(model, distance_evaluator(target, CUT), "minimize", CUT, PsoParams())
    distance, weights = res.fGX, res.GX.tolist()
    assert distance == 0.0, f"best weights {weights}"
    assert base1 == model


@pytest.mark.parametrize("seed", range(10))
def test_zero_distance_returns_model(model, seed):
    target = ModelTarget((1.0,) * 16)
    base1, res = optimize_rulebase(model, distance_evaluator(target, CUT), "minimize", CUT,
                                   PsoParams(seed=seed, target=0.0))
    assert (res.fGX == 0.0) == (base1 == model)


def test_single_rule_two_agents(model):
    one = model.with_rules(model.rules[:1])
    base1, res = optimize_rulebase(one, distance_evaluator(ModelTarget((1.0,)), CUT), "minimize", CUT,
                                   PsoParams(agents=2))
    assert res.GX.tolist() == [1.0] and res.fGX == 0.0
    assert base1 == one


def test_only_weights_matter(model):
    """Replacing every rule's content leaves the search bit-identical."""
    base0, target = generate_noisy_base(model, 14, seed=5)
    other = base0.with_rules(list(reversed(base0.rules)))
    params = PsoParams(max_iters=60, seed=9)
    ev = distance_evaluator(target, CUT)
    _, r1 = optimize_rulebase(base0, ev, "minimize", CUT, params)
    _, r2 = optimize_rulebase(other, ev, "minimize", CUT, params)
    assert np.array_equal(r1.GX, r2.GX) and r1.trace == r2.trace


def test_permutation_invariance(model):
    base = model.with_rules(model.rules[:4])
    t = (1.0, 0.0, 1.0, 1.0)
    finals = set()
    for perm in itertools.permutations(range(4)):
        pbase = base.with_rules([base.rules[i] for i in perm])
        ptarget = ModelTarget(tuple(t[i] for i in perm))
        _, res = optimize_rulebase(pbase, distance_evaluator(ptarget, CUT), "minimize", CUT,
                                   PsoParams(max_iters=300, seed=sum(perm)))
        finals.add(res.fGX)
    assert finals == {0.0}


def test_evaluator_failure_carries_weights(model):
    def boom(c):
        raise ValueError("bad")
    with pytest.raises(ObjectiveError) as err:
        optimize_rulebase(model, boom, "minimize", CUT, PsoParams(max_iters=2))
    assert err.value.position.shape == (16,)
    assert "bad" in str(err.value)


def test_empty_base_rejected(model):
    with pytest.raises(ConfigError):
        optimize_rulebase(model.with_rules([]), lambda c: 0.0, "minimize", CUT, PsoParams())


def test_scenario_evaluator(model):
    scenarios = [({U0: 4.0, PSI: 0.0}, {ALPHA: 10.0, DL: 8 / 9, DPSI: 0.0})]
    ev = scenario_evaluator(scenarios)
    assert ev(Candidate(model, np.ones(16), CUT)) < 1e-6
    # nothing fires: every output costs the full penalty
    assert ev(Candidate(model, np.zeros(16), CUT)) == 1.0
    with pytest.raises(ConfigError):
        scenario_evaluator([])


def test_scenario_optimization_runs(model):
    scenarios = [({U0: 4.0, PSI: 0.0}, {ALPHA: 10.0}), ({U0: 25.0, PSI: 80.0}, {ALPHA: 80.0})]
    base1, res = optimize_rulebase(model, scenario_evaluator(scenarios, grid_size=201), "minimize", CUT,
                                   PsoParams(agents=6, max_iters=10))
    assert res.fGX < 0.5 and len(res.trace) == 10


def test_noisy_base_default_size(model):
    base0, target = generate_noisy_base(model, 184, seed=0)
    assert len(base0) == 200
    assert target.ones == 16 and target.target_weights[:16] == (1.0,) * 16
    assert base0.rules[:16] == model.rules
    keys = [r.key for r in base0.rules]
    assert len(set(keys)) == 200
    assert all(r.weight == 1.0 for r in base0.rules)
    for r in base0.rules[16:]:
        assert [v for v, _ in r.antecedent] == [U0, PSI]
        assert [v for v, _ in r.consequent] == [ALPHA, DL, DPSI]


def test_noisy_base_deterministic(model):
    a, _ = generate_noisy_base(model, 184, seed=3)
    b, _ = generate_noisy_base(model, 184, seed=3)
    c, _ = generate_noisy_base(model, 184, seed=4)
    assert a == b and a != c


def test_noisy_base_extra_zero(model):
    base0, target = generate_noisy_base(model, 0, seed=0)
    assert base0 == model and target.target_weights == (1.0,) * 16


def test_noisy_base_capacity(model):
    # 16 antecedents x 4 * 4 * 5 consequents = 1280 rules, 16 taken
    full, _ = generate_noisy_base(model, 1264, seed=0)
    assert len({r.key for r in full.rules}) == 1280
    with pytest.raises(CapacityError):
        generate_noisy_base(model, 1265, seed=0)
    with pytest.raises(ConfigError):
        generate_noisy_base(model, -1, seed=0)


def test_noisy_base_small_space():
    x = make_variable("x", (0, 1), {"A": [(0, 1), (1, 0)], "B": [(0, 0), (1, 1)]})
    y = make_variable("y", (0, 1), {"A": [(0, 1), (1, 0)], "B": [(0, 0), (1, 1)]})
    base = RuleBase((x,), (y,), (FuzzyRule((("x", "A"),), (("y", "A"),)),))
    base0, _ = generate_noisy_base(base, 3, seed=0)
    assert len({r.key for r in base0.rules}) == 4
    with pytest.raises(CapacityError):
        generate_noisy_base(base, 4, seed=0)
