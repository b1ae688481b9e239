import pytest

from ghcat.catalog import Z2X2_Z_CHOICES, catalog_list, catalog_solution, z2x2_solution


@pytest.fixture(scope="session")
def catalog():
    return {name: catalog_solution(name) for name in catalog_list()}


@pytest.fixture(scope="session")
def z2x2_family():
    return {(s, z): z2x2_solution(s, z) for s in (1, -1) for z in Z2X2_Z_CHOICES}


@pytest.fixture(scope="session")
def all_verified(catalog, z2x2_family):
    return list(catalog.values()) + list(z2x2_family.values())
