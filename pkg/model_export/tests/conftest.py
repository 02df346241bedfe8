import pytest

from alexnet_export import ExportConfig, export


@pytest.fixture(scope="session")
def exported_dir(tmp_path_factory):
    """One full random-weight export shared by the whole session."""
    directory = tmp_path_factory.mktemp("exported")
    export(ExportConfig(output_dir=directory, weights="random", seed=7))
    return directory
