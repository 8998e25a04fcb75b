import numpy as np
import pytest

from rulenet import datagen, encoder, extractor, network, pruner, trainer


@pytest.fixture(scope="session")
def scheme():
    return encoder.default_scheme()


@pytest.fixture(scope="session")
def f2_tuples():
    cfg = datagen.GeneratorConfig(count=1000, seed=42, perturbation=0.05,
                                  function_id="F2")
    return datagen.generate_tuples(cfg)


@pytest.fixture(scope="session")
def f2_data(f2_tuples, scheme):
    return encoder.encode_dataset(f2_tuples, scheme)


@pytest.fixture(scope="session")
def params():
    return network.ObjectiveParams()


@pytest.fixture(scope="session")
def train_cfg():
    return trainer.TrainConfig()


@pytest.fixture(scope="session")
def f2_trained(f2_data, params, train_cfg):
    """A converged network on the noisy Function 2 training set."""
    net = network.init_random(87, 4, 2, seed=7)
    trained, report = trainer.train(net, f2_data, params, train_cfg)
    assert report.train_accuracy >= 0.9
    return trained, report


@pytest.fixture(scope="session")
def f2_pruned(f2_trained, f2_data, params, train_cfg):
    net, _ = f2_trained
    return pruner.prune(net, f2_data, params, pruner.PruneConfig(), train_cfg)


@pytest.fixture(scope="session")
def f2_extraction(f2_pruned, f2_data, scheme, params, train_cfg):
    net, _ = f2_pruned
    return extractor.extract_rules(
        net, f2_data, scheme, extractor.ExtractConfig(), params, train_cfg,
        pruner.PruneConfig(),
    )


@pytest.fixture()
def rng():
    return np.random.default_rng(12345)
