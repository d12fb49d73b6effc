import pytest
from hypothesis import settings

from app import create_app
from completion.abelian import parse_group

settings.register_profile("default", deadline=None, max_examples=40)
settings.load_profile("default")


@pytest.fixture
def app():
    return create_app('testing')


@pytest.fixture
def client(app):
    return app.test_client()


@pytest.fixture
def G():
    """Shorthand for parsing groups in assertions."""
    return parse_group
