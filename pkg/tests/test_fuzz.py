from fimod import fuzz
from fimod import io
from fimod.scalars import GF


def test_sampling_is_deterministic():
    a = fuzz.sample_cases(7, 5)
    b = fuzz.sample_cases(7, 5)
    assert [io.serialize_presentation(p) for p, _ in a] == [io.serialize_presentation(p) for p, _ in b]
    assert [v.dims for _, v in a] == [v.dims for _, v in b]


def test_samples_respect_caps():
    for _, v in fuzz.sample_cases(3, 6, field=GF(2)):
        assert v.field == GF(2)
        assert sum(v.dims) > 0
        assert max(v.dims) <= fuzz.DIM_CAP
        assert fuzz.resolution_size(v) <= fuzz.RES_CAP


def test_run_case_finds_no_violations():
    results = [fuzz.run_case(v) for _, v in fuzz.sample_cases(11, 4)]
    assert all(not r.violations for r in results), [r.violations for r in results]
    summary = fuzz.summarize(results)
    assert summary
