import os

from dotenv import load_dotenv

load_dotenv()


def _int(name, default):
    return int(os.environ.get(name) or default)


class Config:
    """Base configuration class."""

    # Engine
    DEFAULT_PRIME = _int('DEFAULT_PRIME', 2)
    STAGE_BUDGET = _int('STAGE_BUDGET', 12)  # tower oracle stages, >= 3

    # Property suite
    SUITE_SEED = _int('SUITE_SEED', 42)
    SUITE_COMPLEXES = _int('SUITE_COMPLEXES', 200)
    SUITE_TAME_SUMS = _int('SUITE_TAME_SUMS', 500)
    SUITE_SPACES = _int('SUITE_SPACES', 100)
    SUITE_PRESHEAVES = _int('SUITE_PRESHEAVES', 20)
    SUITE_RESOLVABLE_FLOOR = float(os.environ.get('SUITE_RESOLVABLE_FLOOR') or 0.8)

    # Reports
    REPORT_FORMAT = os.environ.get('REPORT_FORMAT') or 'text'
    LOG_LEVEL = os.environ.get('LOG_LEVEL') or 'INFO'

    # Monitoring
    SENTRY_DSN = os.environ.get('SENTRY_DSN')

    # Rate limiting
    RATELIMIT_ENABLED = True
    RATELIMIT_DEFAULT = os.environ.get('RATELIMIT_DEFAULT') or "100 per hour"
    SUITE_RATELIMIT = os.environ.get('SUITE_RATELIMIT') or "5 per hour"

class DevelopmentConfig(Config):
    """Development configuration."""
    DEBUG = True
    TESTING = False
    LOG_LEVEL = os.environ.get('LOG_LEVEL') or 'DEBUG'

class ProductionConfig(Config):
    """Production configuration."""
    DEBUG = False
    TESTING = False

    # Production rate limiting (more strict)
    RATELIMIT_DEFAULT = os.environ.get('RATELIMIT_DEFAULT') or "50 per hour"

class TestingConfig(Config):
    """Testing configuration."""
    TESTING = True
    LOG_LEVEL = 'WARNING'
    RATELIMIT_ENABLED = False

    # Small suite so the service tests stay fast
    SUITE_COMPLEXES = 12
    SUITE_TAME_SUMS = 30
    SUITE_SPACES = 10
    SUITE_PRESHEAVES = 3

# Configuration mapping
config = {
    'development': DevelopmentConfig,
    'production': ProductionConfig,
    'testing': TestingConfig,
    'default': DevelopmentConfig
}


def get_config(name=None):
    """Config class for a name; unknown names fall back to 'default'."""
    return config.get(name or 'default', config['default'])


def settings_of(cls):
    """Upper-case attributes of a config class as a plain dict."""
    return {key: getattr(cls, key) for key in dir(cls) if key.isupper()}
