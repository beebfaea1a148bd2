import factory
import factory.fuzzy

from .models import SweepRun, TrialResult
from .schemes import DEFAULT_SCHEMES


class SweepRunFactory(factory.django.DjangoModelFactory):
    preset = "fig2"
    sweep_variable = "power"
    trials = 2
    base_seed = factory.Sequence(lambda n: n)
    status = SweepRun.DONE

    class Meta:
        model = SweepRun


class TrialResultFactory(factory.django.DjangoModelFactory):
    run = factory.SubFactory(SweepRunFactory)
    sweep_value = 20.0
    trial = factory.Sequence(lambda n: n)
    scheme = factory.fuzzy.FuzzyChoice(DEFAULT_SCHEMES)
    secrecy_rate = factory.fuzzy.FuzzyFloat(0.0, 10.0)
    objective_ratio = factory.LazyAttribute(lambda o: 2.0 ** o.secrecy_rate)
    ao_iters = 1
    wall_ms = factory.fuzzy.FuzzyFloat(0.1, 50.0)
    seed = factory.fuzzy.FuzzyInteger(0, 2 ** 62)

    class Meta:
        model = TrialResult
