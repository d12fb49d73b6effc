def test_health(client):
    response = client.get('/api/health')
    assert response.status_code == 200
    assert response.get_json() == {'status': 'ok'}


def test_li(client):
    response = client.post('/api/li', json={'group': 'Prufer(3) + Z/9', 'prime': 3})
    assert response.status_code == 200
    data = response.get_json()
    assert data['l0'] == 'Z/9'
    assert data['l1'] == 'Zp(3)'
    assert data['profile']['bounded_p_divisibility'] is False


def test_li_uses_default_prime(client):
    data = client.post('/api/li', json={'group': 'Z'}).get_json()
    assert data['prime'] == 2
    assert data['l0'] == 'Zp(2)'


def test_complete(client):
    response = client.post('/api/complete', json={
        'complex': 'degrees 0..1; rank 0 = 1; rank 1 = 1; d 1 = [12];',
        'prime': 3,
    })
    data = response.get_json()
    assert response.status_code == 200
    assert data['engine'] == {'0': 'Z/3'}
    assert data['passed'] is True


def test_space_and_em(client):
    data = client.post('/api/space', json={'space': 'K(Prufer(2), 2) x K(Z, 5)'}).get_json()
    assert data['completion'] == 'K(Zp(2), 3) x K(Zp(2), 5)'
    data = client.post('/api/em', json={'space': 'K(Q, 2)'}).get_json()
    assert data['completion'] == 'point'


def test_presheaf(client):
    data = client.post('/api/presheaf', json={
        'presheaf': 'poset a, b; le a b; section a = Z/2; section b = Z/4;',
    }).get_json()
    assert data['sections'] == {'a': '0: Z/2', 'b': '0: Z/4'}
    assert data['checks']['commutes_with_restriction'] is True
    assert data['passed'] is True


def test_parse_error_is_400(client):
    response = client.post('/api/li', json={'group': 'Z +'})
    assert response.status_code == 400
    data = response.get_json()
    assert data['error'] == 'parse_error'
    assert data['position'] == 3


def test_missing_key_is_400(client):
    response = client.post('/api/complete', json={})
    assert response.status_code == 400
    assert response.get_json()['error'] == 'invalid_input'


def test_bad_prime_is_400(client):
    response = client.post('/api/li', json={'group': 'Z', 'prime': 6})
    assert response.status_code == 400


def test_unresolved_extension_is_422(client):
    response = client.post('/api/space', json={'space': 'K(Prufer(2), 2) x K(Z, 3)'})
    assert response.status_code == 422
    data = response.get_json()
    assert data['error'] == 'unresolved_extension'


def test_suite(client):
    response = client.post('/api/suite', json={'seed': 11})
    assert response.status_code == 200
    data = response.get_json()
    assert data['seed'] == 11
    assert [row['name'] for row in data['checks']][:2] == ['oracle_equivalence', 'zero_completion_equivalence']


def test_app_runs_without_a_secret_key(app):
    assert app.config['SECRET_KEY'] is None
    assert app.test_client().get('/api/health').status_code == 200
