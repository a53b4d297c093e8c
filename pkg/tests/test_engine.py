import itertools
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from duelist.benchmarks import get_benchmark, m1
from duelist.core import (
    Category,
    ConfigError,
    ContractViolation,
    Duelist,
    EvaluationError,
    Evaluator,
    RandomStream,
    SearchDomain,
    decode,
)
from duelist.engine import (
    EngineConfig,
    config_to_dict,
    duel,
    duel_outcomes,
    eliminate,
    improve,
    innovate,
    learn,
    prequalify,
    register,
    run,
    schedule,
    select_champions,
    step,
)

BOX = SearchDomain((0.0, 0.0), (10.0, 10.0), 16)


def pop_with(fitness, n_bits=4):
    return [Duelist(np.full(n_bits, i % 2, dtype=np.uint8), float(f)) for i, f in enumerate(fitness)]


def bits(value, n):
    return np.full(n, value, dtype=np.uint8)


# --- config ---------------------------------------------------------------------

def test_default_config():
    cfg = EngineConfig()
    assert (cfg.population_size, cfg.max_generations, cfg.luck_coefficient) == (100, 200, 0.0)
    assert (cfg.learning_probability, cfg.innovation_probability, cfg.champion_count) == (0.5, 0.5, 5)


@pytest.mark.parametrize("changes, key", [
    ({"population_size": 1}, "champion_count"),
    ({"population_size": 5, "champion_count": 5}, "champion_count"),
    ({"learning_probability": 1.5}, "learning_probability"),
    ({"innovation_probability": -0.1}, "innovation_probability"),
    ({"luck_coefficient": -1.0}, "luck_coefficient"),
    ({"max_generations": 0}, "max_generations"),
    ({"champion_count": 0}, "champion_count"),
    ({"seed": -2}, "seed"),
])
def test_config_rejections_name_the_key(changes, key):
    with pytest.raises(ConfigError) as info:
        EngineConfig(**changes)
    assert info.value.key == key
    assert key in str(info.value)


def test_config_to_dict_round_trip():
    cfg = EngineConfig(population_size=12, champion_count=3, seed=8)
    assert EngineConfig(**config_to_dict(cfg)) == cfg


# --- register / prequalify ------------------------------------------------------

def test_register_size_and_state():
    pop = register(EngineConfig(), BOX, RandomStream(1))
    assert len(pop) == 100
    assert all(d.fitness is None and d.category is Category.UNRANKED for d in pop)


def test_register_same_seed_same_population():
    a = register(EngineConfig(), BOX, RandomStream(3))
    b = register(EngineConfig(), BOX, RandomStream(3))
    assert all(np.array_equal(x.skillset, y.skillset) for x, y in zip(a, b))


def test_prequalify_constant_objective():
    pop = prequalify(register(EngineConfig(population_size=10, champion_count=1), BOX, RandomStream(1)),
                     Evaluator(lambda x: 3, BOX))
    assert [d.fitness for d in pop] == [3.0] * 10


def test_prequalify_matches_direct_calls_and_counts():
    ev = Evaluator(get_benchmark("m1").objective, BOX)
    pop = prequalify(register(EngineConfig(), BOX, RandomStream(2)), ev)
    assert ev.count == 100
    for d in pop:
        x, y = decode(d.skillset, BOX)
        assert d.fitness == m1(x, y)


def test_prequalify_error_carries_index():
    def objective(p):
        return float("inf") if p[0] > 5 else 0.0

    pop = [Duelist(bits(0, 32)), Duelist(bits(0, 32)), Duelist(bits(1, 32))]
    with pytest.raises(EvaluationError) as info:
        prequalify(pop, Evaluator(objective, BOX))
    assert info.value.index == 2


# --- champions ------------------------------------------------------------------

def test_select_champions_tie_break_by_index():
    pop = pop_with([5, 9, 1, 9, 3])
    champions, clones = select_champions(pop, 2)
    assert [pop.index(c) for c in champions] == [1, 3]
    assert all(c.category is Category.CHAMPION for c in champions)
    assert [d.category for d in pop] == [Category.UNRANKED, Category.CHAMPION, Category.UNRANKED,
                                          Category.CHAMPION, Category.UNRANKED]


def test_select_champions_boundary_and_clones_are_copies():
    pop = pop_with([1, 2, 3, 4, 5, 6])
    champions, clones = select_champions(pop, 5)
    assert len(clones) == 5
    for c, k in zip(champions, clones):
        assert np.array_equal(decode(c.skillset, SearchDomain((0.0,), (1.0,), 4)),
                              decode(k.skillset, SearchDomain((0.0,), (1.0,), 4)))
        assert k.category is Category.UNRANKED and k.fitness == c.fitness
        assert k.skillset is not c.skillset


def test_select_champions_resets_stale_categories():
    pop = pop_with([1, 2, 3])
    pop[0].category = Category.LOSER
    select_champions(pop, 1)
    assert pop[0].category is Category.UNRANKED


def test_select_champions_exhaustive_small():
    for fitness in itertools.product(range(3), repeat=4):
        pop = pop_with(fitness)
        champions, _ = select_champions(pop, 2)
        expected = sorted(range(4), key=lambda i: (-fitness[i], i))[:2]
        assert [pop.index(c) for c in champions] == expected


# --- schedule -------------------------------------------------------------------

def test_schedule_even_partition():
    pairs, bye = schedule(4, RandomStream(1))
    assert len(pairs) == 2 and bye is None
    assert sorted(itertools.chain.from_iterable(pairs)) == [0, 1, 2, 3]


def test_schedule_odd_has_bye():
    pairs, bye = schedule(5, RandomStream(1))
    assert len(pairs) == 2 and bye is not None
    assert sorted(list(itertools.chain.from_iterable(pairs)) + [bye]) == list(range(5))


def test_schedule_pairings_uniform():
    rng = RandomStream(12)
    counts = Counter()
    for _ in range(10_000):
        pairs, _ = schedule(4, rng)
        counts[frozenset(frozenset(p) for p in pairs)] += 1
    assert len(counts) == 3
    for c in counts.values():
        assert abs(c / 10_000 - 1 / 3) <= 0.02


# --- duel -----------------------------------------------------------------------

def test_duel_without_luck_is_deterministic():
    a, b = Duelist(bits(0, 4), 5.0), Duelist(bits(1, 4), 3.0)
    winner, loser = duel(a, b, 0.0, RandomStream(1))
    assert winner is a and loser is b
    assert a.category is Category.WINNER and b.category is Category.LOSER
    assert a.luck == 0.0 and b.luck == 0.0


def test_duel_tie_is_fair_coin():
    rng = RandomStream(4)
    wins = 0
    for _ in range(10_000):
        a, b = Duelist(bits(0, 4), 3.0), Duelist(bits(1, 4), 3.0)
        wins += duel(a, b, 0.0, rng)[0] is a
    assert abs(wins / 10_000 - 0.5) <= 0.02


def test_duel_luck_formula():
    rng, ref = RandomStream(6), RandomStream(6)
    a, b = Duelist(bits(0, 4), 10.0), Duelist(bits(1, 4), 9.0)
    duel(a, b, 0.5, rng)
    u = ref.units(2)
    assert a.luck == 10.0 * (0.5 + u[0] * 0.5)
    assert b.luck == 9.0 * (0.5 + u[1] * 0.5)


# Upset rates of fitness 10 vs weaker opponents, from an independent 10^6-draw Monte-Carlo run.
UPSET_ORACLE = {(9.0, 0.1): 0.0, (9.0, 0.5): 0.199846, (9.9, 0.1): 0.390444, (9.9, 0.5): 0.46631}


@pytest.mark.parametrize("weaker, lc", list(UPSET_ORACLE))
def test_duel_upset_frequency_matches_oracle(weaker, lc):
    a_wins, _, _ = duel_outcomes(np.full(200_000, 10.0), np.full(200_000, weaker), lc, RandomStream(31))
    assert abs((1 - a_wins.mean()) - UPSET_ORACLE[(weaker, lc)]) <= 0.02


def test_duel_requires_fitness():
    with pytest.raises(ContractViolation):
        duel(Duelist(bits(0, 4)), Duelist(bits(1, 4), 1.0), 0.0, RandomStream(1))


def test_single_duel_matches_batched_kernel():
    for seed in range(20):
        a, b = Duelist(bits(0, 4), 4.0), Duelist(bits(1, 4), 3.9)
        winner, _ = duel(a, b, 0.3, RandomStream(seed))
        a_wins, _, _ = duel_outcomes([4.0], [3.9], 0.3, RandomStream(seed))
        assert (winner is a) == bool(a_wins[0])


# --- learn / innovate -----------------------------------------------------------

def test_learn_full_copy():
    loser, winner = Duelist(bits(0, 64), 1.0), Duelist(bits(1, 64), 2.0)
    out = learn(loser, winner, 1.0, RandomStream(1))
    assert np.array_equal(out.skillset, winner.skillset)
    assert out.fitness is None


def test_learn_no_op():
    loser, winner = Duelist(bits(0, 64), 1.0), Duelist(bits(1, 64), 2.0)
    out = learn(loser, winner, 0.0, RandomStream(1))
    assert np.array_equal(out.skillset, loser.skillset) and out.fitness == 1.0


def test_learn_half():
    out = learn(Duelist(bits(0, 10_000)), Duelist(bits(1, 10_000)), 0.5, RandomStream(2))
    assert abs(out.skillset.mean() - 0.5) <= 0.02


def test_learn_length_mismatch():
    with pytest.raises(ContractViolation):
        learn(Duelist(bits(0, 4)), Duelist(bits(1, 5)), 0.5, RandomStream(1))


def test_innovate_limits():
    d = Duelist(np.array([0, 1, 1, 0, 1], dtype=np.uint8), 3.0)
    assert np.array_equal(innovate(d, 0.0, RandomStream(1)).skillset, d.skillset)
    flipped = innovate(d, 1.0, RandomStream(1))
    assert np.array_equal(flipped.skillset, 1 - d.skillset) and flipped.fitness is None


def test_innovate_rate():
    out = innovate(Duelist(bits(0, 10_000)), 0.1, RandomStream(3))
    assert abs(int(out.skillset.sum()) - 1000) <= 60


@given(st.lists(st.integers(0, 1), min_size=1, max_size=64), st.lists(st.integers(0, 1), min_size=1, max_size=64),
       st.integers(0, 2**32))
def test_learn_then_no_innovation_gives_winner(loser_bits, winner_bits, seed):
    n = min(len(loser_bits), len(winner_bits))
    loser = Duelist(np.array(loser_bits[:n], dtype=np.uint8))
    winner = Duelist(np.array(winner_bits[:n], dtype=np.uint8))
    rng = RandomStream(seed)
    out = innovate(learn(loser, winner, 1.0, rng), 0.0, rng)
    assert np.array_equal(out.skillset, winner.skillset)


@given(st.floats(0, 1), st.integers(0, 2**32))
@settings(max_examples=50)
def test_learn_only_takes_winner_bits(p, seed):
    rng = np.random.default_rng(seed % 1000)
    lb = rng.integers(0, 2, 40).astype(np.uint8)
    wb = rng.integers(0, 2, 40).astype(np.uint8)
    out = learn(Duelist(lb), Duelist(wb), p, RandomStream(seed)).skillset
    assert np.all((out == lb) | (out == wb))


# --- improve --------------------------------------------------------------------

def test_improve_losers_copy_winner_before_innovation():
    duelers = [Duelist(bits(1, 16), 5.0), Duelist(bits(0, 16), 1.0)]
    cfg = EngineConfig(population_size=4, champion_count=1, learning_probability=1.0,
                       innovation_probability=1.0)
    out = improve(duelers, [(0, 1)], cfg, RandomStream(1))
    assert np.array_equal(out[1].skillset, bits(1, 16))  # learned the pre-flip winner
    assert np.array_equal(out[0].skillset, bits(0, 16))  # winner fully flipped
    assert duelers[0].category is Category.WINNER and duelers[1].category is Category.LOSER


def test_improve_bye_is_untouched():
    duelers = [Duelist(bits(1, 8), 5.0), Duelist(bits(0, 8), 1.0), Duelist(bits(1, 8), 2.0)]
    cfg = EngineConfig(population_size=4, champion_count=1, learning_probability=1.0,
                       innovation_probability=1.0)
    out = improve(duelers, [(0, 1)], cfg, RandomStream(1))
    assert out[2] is duelers[2]


# --- eliminate ------------------------------------------------------------------

def test_eliminate_top_k():
    survivors = eliminate(pop_with([1, 2, 3, 4, 5]), 3)
    assert [d.fitness for d in survivors] == [5.0, 4.0, 3.0]


def test_eliminate_ties_by_index():
    pop = pop_with([7] * 6)
    assert eliminate(pop, 4) == pop[:4]


def test_eliminate_identity_at_boundary():
    pop = pop_with([3, 1, 2])
    assert sorted(d.fitness for d in eliminate(pop, 3)) == [1.0, 2.0, 3.0]


def test_eliminate_too_short():
    with pytest.raises(ContractViolation):
        eliminate(pop_with([1, 2]), 3)


# --- step / run -----------------------------------------------------------------

def test_step_conserves_population_and_keeps_champions():
    cfg = EngineConfig(population_size=11, champion_count=3)
    ev = Evaluator(get_benchmark("m2").objective, BOX)
    pop = prequalify(register(cfg, BOX, RandomStream(1)), ev)
    rng = RandomStream(2)
    for _ in range(20):
        best_before = max(d.fitness for d in pop)
        pop = step(pop, cfg, ev, rng)
        assert len(pop) == 11
        assert max(d.fitness for d in pop) >= best_before


def test_step_evaluates_only_changed_duelists():
    cfg = EngineConfig(population_size=10, champion_count=2, learning_probability=0.0,
                       innovation_probability=0.0)
    ev = Evaluator(get_benchmark("m1").objective, BOX)
    pop = prequalify(register(cfg, BOX, RandomStream(1)), ev)
    step(pop, cfg, ev, RandomStream(1))
    assert ev.count == 10


def test_run_constant_objective():
    cfg = EngineConfig(population_size=10, max_generations=15, champion_count=2)
    result = run(cfg, lambda x: 2.5, BOX)
    assert len(result.trace) == 15
    assert all(r.best_fitness == 2.5 for r in result.trace)
    assert result.generations_to_best == 1


def test_run_is_deterministic():
    cfg = EngineConfig(population_size=20, max_generations=30, champion_count=2, luck_coefficient=0.2, seed=5)
    a = run(cfg, get_benchmark("m2").objective, BOX)
    b = run(cfg, get_benchmark("m2").objective, BOX)
    assert a.trace == b.trace
    assert np.array_equal(a.best_duelist.skillset, b.best_duelist.skillset)


def test_run_shared_init_seed_shares_initial_population():
    objective = get_benchmark("m1").objective
    a = run(EngineConfig(population_size=10, max_generations=1, champion_count=1, seed=1, init_seed=9),
            objective, BOX)
    b = run(EngineConfig(population_size=10, max_generations=1, champion_count=1, seed=2, init_seed=9),
            objective, BOX)
    # both start from the same population, so the first champion (best initial duelist) bounds both
    init = prequalify(register(EngineConfig(population_size=10, champion_count=1), BOX, RandomStream(9, 0)),
                      Evaluator(objective, BOX))
    best0 = max(d.fitness for d in init)
    assert a.trace[0].best_fitness >= best0 and b.trace[0].best_fitness >= best0


def test_run_trace_fields():
    cfg = EngineConfig(population_size=10, max_generations=5, champion_count=2)
    result = run(cfg, get_benchmark("m1").objective, BOX)
    assert [r.generation for r in result.trace] == [1, 2, 3, 4, 5]
    evals = [r.evaluations for r in result.trace]
    assert evals == sorted(evals) and evals[0] >= 10
    assert result.best_fitness == result.trace[-1].best_fitness
    assert result.best_point == tuple(decode(result.best_duelist.skillset, BOX).tolist())
    for r in result.trace:
        assert r.mean_fitness <= r.best_fitness


def test_run_error_carries_generation():
    calls = {"n": 0}

    def objective(p):
        calls["n"] += 1
        return float("nan") if calls["n"] > 25 else 0.0

    with pytest.raises(EvaluationError) as info:
        run(EngineConfig(population_size=10, max_generations=10, champion_count=2,
                         innovation_probability=1.0), objective, BOX)
    assert info.value.generation is not None and info.value.generation >= 1


@given(seed=st.integers(0, 2**32), coeffs=st.lists(st.floats(-5, 5), min_size=4, max_size=4),
       lc=st.sampled_from([0.0, 0.1, 0.5]))
@settings(max_examples=40, deadline=None)
def test_elitism_on_random_objectives(seed, coeffs, lc):
    a, b, c, d = coeffs

    def objective(x):
        return a * np.sin(b * x[0]) + c * np.cos(d * x[1]) - 0.01 * x[0] * x[1]

    cfg = EngineConfig(population_size=10, max_generations=20, champion_count=2, luck_coefficient=lc,
                       seed=seed)
    trace = run(cfg, objective, BOX).trace
    best = [r.best_fitness for r in trace]
    assert all(x <= y for x, y in zip(best, best[1:]))
