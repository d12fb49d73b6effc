"""
JSON API for completions and checks
"""
from flask import Blueprint, current_app, jsonify, request

from app import limiter
from app.services import CompletionService, SuiteService
from completion.abelian import check_prime

api_bp = Blueprint('api', __name__)


def _payload():
    return request.get_json(silent=True) or {}


def _required(data, key):
    value = data.get(key)
    if not isinstance(value, str) or not value.strip():
        raise ValueError(f"'{key}' is required")
    return value


def _prime(data):
    return check_prime(int(data.get('prime') or current_app.config['DEFAULT_PRIME']))


def _stages(data):
    stages = int(data.get('stages') or current_app.config['STAGE_BUDGET'])
    if stages < 3:
        raise ValueError("stages must be >= 3")
    return stages


@api_bp.route('/health')
def health():
    """Liveness check."""
    return jsonify({'status': 'ok'})


@api_bp.route('/li', methods=['POST'])
def li():
    """L0 and L1 of a tame group."""
    data = _payload()
    return jsonify(CompletionService.li(_required(data, 'group'), _prime(data)))


@api_bp.route('/complete', methods=['POST'])
def complete():
    """Completion of a complex, engine against tower oracle."""
    data = _payload()
    return jsonify(CompletionService.complete(_required(data, 'complex'), _prime(data), _stages(data)))


@api_bp.route('/ses', methods=['POST'])
def ses():
    data = _payload()
    degree = data.get('degree')
    degree = None if degree is None else int(degree)
    return jsonify(CompletionService.ses(_required(data, 'spectrum'), _prime(data), degree))


@api_bp.route('/peq', methods=['POST'])
def peq():
    data = _payload()
    return jsonify(CompletionService.peq(_required(data, 'map'), _prime(data)))


@api_bp.route('/em', methods=['POST'])
def em():
    data = _payload()
    return jsonify(CompletionService.em(_required(data, 'space'), _prime(data)))


@api_bp.route('/space', methods=['POST'])
def space():
    data = _payload()
    return jsonify(CompletionService.space(_required(data, 'space'), _prime(data)))


@api_bp.route('/postnikov-check', methods=['POST'])
def postnikov_check():
    data = _payload()
    return jsonify(CompletionService.postnikov_check(_required(data, 'space'), _prime(data)))


@api_bp.route('/presheaf', methods=['POST'])
def presheaf():
    data = _payload()
    return jsonify(CompletionService.presheaf(_required(data, 'presheaf'), _prime(data)))


@api_bp.route('/suite', methods=['POST'])
@limiter.limit(lambda: current_app.config['SUITE_RATELIMIT'])
def suite():
    """Run the property suite; the seed defaults to SUITE_SEED."""
    data = _payload()
    seed = int(data['seed']) if data.get('seed') is not None else current_app.config['SUITE_SEED']
    return jsonify(SuiteService.run(seed, current_app.config))
