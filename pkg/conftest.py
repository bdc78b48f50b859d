def pytest_configure(config):
    config.addinivalue_line("markers", "slow: minute-scale numerical checks")
