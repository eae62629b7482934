import itertools
import math

import numpy as np
import pytest

from linefix.corpus import make_corpus
from linefix.driver import OracleGoldPolicy
from linefix.evaluator import EvaluatorSpec
from linefix.lang import program_from_lines
from linefix.perturb import rng_from
from linefix.search import (Candidate, best_first_search,
                            make_synthetic_pools, repair_augmented_search)

MINI = EvaluatorSpec(kind="minicheck")


def pools_from(gold_lines, extras, probs):
    """Simple pool builder: gold line first with probs[i][0]."""
    pools = []
    for i, line in enumerate(gold_lines):
        cands = [Candidate(tuple(line.split()), probs[i][0])]
        for j, alt in enumerate(extras[i]):
            cands.append(Candidate(tuple(alt.split()), probs[i][j + 1]))
        pools.append(cands)
    return pools


GOLD = program_from_lines(["int a ;", "a = 1 ;"])


def test_gold_top1_succeeds_first_iteration():
    pools = pools_from(["int a ;", "a = 1 ;"],
                       [["int a"], ["a = ;"]],
                       [[0.9, 0.1], [0.8, 0.2]])
    out = best_first_search(pools, MINI, budget=10, gold=GOLD)
    assert out.success
    assert out.iterations_used == 1


def test_budget_zero_fails():
    pools = pools_from(["int a ;"], [[]], [[1.0]])
    out = best_first_search(pools, MINI, budget=0)
    assert not out.success
    assert out.iterations_used == 0


def test_pop_order_matches_brute_force():
    rng = rng_from(31)
    for trial in range(120):
        n_lines = int(rng.integers(1, 4))
        sizes = [int(rng.integers(1, 5)) for _ in range(n_lines)]
        pools = [[Candidate((f"tok{i}_{j}",), float(rng.uniform(0.05, 1.0)))
                  for j in range(sizes[i])] for i in range(n_lines)]
        total = math.prod(sizes)
        out = best_first_search(pools, MINI, budget=total + 5)
        brute = sorted((math.prod(pools[i][c].p for i, c in enumerate(combo))
                        for combo in itertools.product(*[range(s) for s in sizes])),
                       reverse=True)
        assert len(out.pop_scores) == total  # exhaustive, each popped once
        assert np.allclose(out.pop_scores, brute)
        assert all(a >= b - 1e-12 for a, b in zip(out.pop_scores, out.pop_scores[1:]))


def test_pop_order_with_ties():
    pools = [[Candidate(("a",), 0.5), Candidate(("b",), 0.5)],
             [Candidate(("c",), 0.5), Candidate(("d",), 0.5)]]
    out = best_first_search(pools, MINI, budget=10)
    assert out.pop_scores == [0.25, 0.25, 0.25, 0.25]


def test_repair_insertion_reaches_unreachable_gold():
    gold = program_from_lines(["int a ;", "a = 2 ;"])
    # gold line 2 absent from its pool entirely
    pools = pools_from(["int a ;", "a = ;"],
                       [["int a"], ["a 2 ;"]],
                       [[0.9, 0.1], [0.8, 0.2]])
    plain = best_first_search(pools, MINI, budget=50, gold=gold)
    assert not plain.success
    augmented = repair_augmented_search(pools, MINI, OracleGoldPolicy(gold),
                                        budget=50, gold=gold)
    assert augmented.success
    assert augmented.repairs_added >= 1


def test_inserted_candidates_distinct_and_scores_non_increasing():
    gold = program_from_lines(["int a ;", "a = 2 ;"])
    pools = pools_from(["int a ;", "a = ;"],
                       [["int a"], ["a 2 ;"]],
                       [[0.9, 0.1], [0.8, 0.2]])
    out = repair_augmented_search(pools, MINI, OracleGoldPolicy(gold),
                                  budget=50, gold=gold)
    assert out.repairs_added >= 0
    assert all(a >= b - 1e-12 for a, b in zip(out.pop_scores, out.pop_scores[1:]))


def test_candidate_probability_validated():
    with pytest.raises(ValueError):
        Candidate(("x",), 0.0)
    with pytest.raises(ValueError):
        Candidate(("x",), 1.5)


def test_make_synthetic_pools_deterministic():
    gold = make_corpus(3, seed=33)[0]
    a, ga = make_synthetic_pools(gold, 5, rng_from(33, 0))
    b, gb = make_synthetic_pools(gold, 5, rng_from(33, 0))
    assert ga == gb
    assert [[(c.texts, c.p) for c in pool] for pool in a] == \
        [[(c.texts, c.p) for c in pool] for pool in b]


def test_make_synthetic_pools_no_demotion_top1():
    gold = make_corpus(5, seed=34)[1]
    pools, gold_ids = make_synthetic_pools(gold, 1, rng_from(34, 1),
                                           demote_prob=0.0)
    assert all(g == 0 for g in gold_ids)
    assert all(len(p) == 1 for p in pools)
    out = best_first_search(pools, MINI, budget=1, gold=gold)
    assert out.success and out.iterations_used == 1


def test_full_demotion_first_pop_differs_from_gold():
    gold = make_corpus(6, seed=35)[2]
    pools, gold_ids = make_synthetic_pools(gold, 4, rng_from(35, 2),
                                           demote_prob=1.0)
    assert any(g != 0 for g in gold_ids)
    top = [max(range(len(p)), key=lambda j: p[j].p) for p in pools]
    assert any(t != g for t, g in zip(top, gold_ids))


def test_dominance_on_seeded_tasks():
    corpus = make_corpus(25, seed=36)
    wins = ties = 0
    for idx, gold in enumerate(corpus):
        rng = rng_from(36, idx)
        pools, _ = make_synthetic_pools(gold, 4, rng, demote_prob=0.7,
                                        drop_gold=(idx % 2 == 0))
        plain = best_first_search(pools, MINI, budget=10, gold=gold)
        aug = repair_augmented_search(pools, MINI, OracleGoldPolicy(gold),
                                      budget=10, gold=gold)
        assert aug.success >= plain.success
        if aug.success > plain.success:
            wins += 1
        elif aug.success == plain.success:
            ties += 1
    assert wins > 0


def test_dropped_gold_plain_never_succeeds():
    corpus = make_corpus(10, seed=37)
    aug_wins = 0
    for idx, gold in enumerate(corpus):
        pools, gold_ids = make_synthetic_pools(gold, 3, rng_from(37, idx),
                                               demote_prob=0.5, drop_gold=True)
        assert -1 in gold_ids
        plain = best_first_search(pools, MINI, budget=30, gold=gold)
        assert not plain.success  # the gold program is unreachable
        aug = repair_augmented_search(pools, MINI, OracleGoldPolicy(gold),
                                      budget=30, gold=gold)
        aug_wins += aug.success
    assert aug_wins >= 8
