import pytest

from config import ConfiguracionSistema, establecer_config


@pytest.fixture(autouse=True)
def config_limpia():
    """Cada prueba parte de la configuración por defecto"""
    establecer_config(ConfiguracionSistema())
    yield
    establecer_config(ConfiguracionSistema())
