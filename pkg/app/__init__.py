from flask import Flask, jsonify
from flask_limiter import Limiter
from flask_limiter.util import get_remote_address
import os

from completion.errors import (
    CompletionError, InvalidComparison, InvalidComplex, NoStabilization,
    ParseError, UnresolvedExtension,
)

limiter = Limiter(key_func=get_remote_address)

HTTP_STATUS = {
    ParseError: 400,
    InvalidComplex: 400,
    InvalidComparison: 400,
    NoStabilization: 422,
    UnresolvedExtension: 422,
}


def error_status(exc):
    for cls, status in HTTP_STATUS.items():
        if isinstance(exc, cls):
            return status
    return 500


def create_app(config_name=None):
    app = Flask(__name__)

    # Load configuration
    if config_name is None:
        config_name = os.environ.get('FLASK_CONFIG', 'development')

    from config import get_config
    app.config.from_object(get_config(config_name))
    app.logger.setLevel(app.config['LOG_LEVEL'])

    # Error monitoring
    if app.config.get('SENTRY_DSN'):
        import sentry_sdk
        from sentry_sdk.integrations.flask import FlaskIntegration
        sentry_sdk.init(dsn=app.config['SENTRY_DSN'], integrations=[FlaskIntegration()])

    # Initialize extensions
    limiter.init_app(app)

    # Import and register blueprints
    from app.routes.api import api_bp

    app.register_blueprint(api_bp, url_prefix='/api')

    @app.errorhandler(CompletionError)
    def completion_error(exc):
        status = error_status(exc)
        if status == 500:
            app.logger.error("engine failure: %s", exc)
        body = {'error': exc.kind, 'message': str(exc)}
        body.update(exc.details())
        return jsonify(body), status

    @app.errorhandler(ValueError)
    def bad_value(exc):
        return jsonify({'error': 'invalid_input', 'message': str(exc)}), 400

    return app
