import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from lcburden.bundle import LifeTableRow
from lcburden.domain import Sex
from lcburden.epidemiology import CaseMatrix
from lcburden.health_loss import compute_daly, compute_yld, compute_yll


def test_yll_matches_oracle(bundle):
    yll = compute_yll(bundle.life_table)
    assert yll[Sex.MALE] == pytest.approx(oracles.yll(oracles.LIFE_MEN), abs=1e-9)
    assert yll[Sex.FEMALE] == pytest.approx(oracles.yll(oracles.LIFE_WOMEN), abs=1e-9)


def test_life_table_matches_transcription(bundle):
    men = [(r.deaths, r.life_expectancy) for r in bundle.life_table if r.sex is Sex.MALE]
    women = [(r.deaths, r.life_expectancy) for r in bundle.life_table if r.sex is Sex.FEMALE]
    assert men == oracles.LIFE_MEN
    assert women == oracles.LIFE_WOMEN


def test_yld_near_published_total(result):
    # model cases differ slightly from the per-row counts printed next to the weights
    assert result.health_loss.yld == pytest.approx(7097, rel=0.01)


def test_daly_is_yll_plus_yld(result):
    h = result.health_loss
    for sex in (Sex.MALE, Sex.FEMALE):
        assert h.daly_by_sex[sex] == h.yll_by_sex[sex] + h.yld_by_sex[sex]
    assert h.daly == h.yll + h.yld


def test_daly_rejects_mismatched_sexes(bundle):
    yld = compute_yld(CaseMatrix({}), bundle.disability_weights)
    with pytest.raises(ValueError):
        compute_daly({Sex.MALE: 1.0}, yld)


# -- properties ----------------------------------------------------------------

coef = st.floats(-10.0, 10.0, allow_nan=False)


def _rows(bundle, deaths):
    return [LifeTableRow(r.sex, r.age_group, d, r.life_expectancy)
            for r, d in zip(bundle.life_table, deaths)]


@pytest.mark.property
@settings(max_examples=150, deadline=None)
@given(data=st.data(), a=coef, b=coef)
def test_yll_linearity(bundle, data, a, b):
    n = len(bundle.life_table)
    deaths = st.lists(st.floats(0.0, 1e4), min_size=n, max_size=n)
    da, db = data.draw(deaths), data.draw(deaths)
    combined = compute_yll(_rows(bundle, [a * x + b * y for x, y in zip(da, db)]))
    ya, yb = compute_yll(_rows(bundle, da)), compute_yll(_rows(bundle, db))
    for sex in combined:
        expected = a * ya[sex] + b * yb[sex]
        assert combined[sex] == pytest.approx(expected, rel=1e-9, abs=1e-6)


@pytest.mark.property
@settings(max_examples=150, deadline=None)
@given(data=st.data(), a=coef, b=coef)
def test_yld_linearity(bundle, result, data, a, b):
    keys = sorted(result.cases.counts, key=str)
    values = st.lists(st.floats(0.0, 1e5), min_size=len(keys), max_size=len(keys))
    ca = CaseMatrix(dict(zip(keys, data.draw(values))))
    cb = CaseMatrix(dict(zip(keys, data.draw(values))))
    combined = CaseMatrix({k: a * ca[k] + b * cb[k] for k in keys})
    w = bundle.disability_weights
    ya, yb, yc = compute_yld(ca, w), compute_yld(cb, w), compute_yld(combined, w)
    for sex in yc.by_sex:
        expected = a * ya.by_sex[sex] + b * yb.by_sex[sex]
        assert yc.by_sex[sex] == pytest.approx(expected, rel=1e-9, abs=1e-6)


@pytest.mark.property
@settings(max_examples=100, deadline=None)
@given(order=st.permutations(range(38)))
def test_yll_permutation_invariance(bundle, order):
    rows = [bundle.life_table[i] for i in order]
    assert compute_yll(rows) == compute_yll(bundle.life_table)


@pytest.mark.property
@settings(max_examples=50, deadline=None)
@given(seed=st.randoms(use_true_random=False))
def test_yld_permutation_invariance(bundle, result, seed):
    items = list(result.cases.counts.items())
    seed.shuffle(items)
    w = bundle.disability_weights
    assert compute_yld(CaseMatrix(dict(items)), w).by_sex == \
        compute_yld(result.cases, w).by_sex
