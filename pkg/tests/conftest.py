"""
Shared fixtures. Services memoize their expansions, so one instance per
session keeps the k = 1 computations from being repeated in every module.
"""
import pytest

from app.config.settings import Settings
from app.models.config import build_config
from app.services.cancellation_service import CancellationService
from app.services.charform_service import CharFormService
from app.services.golden_service import GoldenService
from app.services.lambda_ring_service import LambdaRingService
from app.services.localization_service import LocalizationService
from app.services.ring_service import RingService
from app.services.theta_service import ThetaService
from app.utils import service_manager


@pytest.fixture(scope="session")
def theta_service():
    return ThetaService()


@pytest.fixture(scope="session")
def charform_service(theta_service):
    return CharFormService(theta_service)


@pytest.fixture(scope="session")
def cancellation_service(charform_service, theta_service):
    return CancellationService(charform_service, theta_service)


@pytest.fixture(scope="session")
def lambda_service(cancellation_service, charform_service):
    return LambdaRingService(cancellation_service, charform_service)


@pytest.fixture(scope="session")
def localization_service(cancellation_service, lambda_service):
    return LocalizationService(cancellation_service, lambda_service)


@pytest.fixture(scope="session")
def golden_service(cancellation_service, lambda_service):
    return GoldenService(cancellation_service, lambda_service)


@pytest.fixture(scope="session")
def ring_service():
    return RingService(trials=4)


@pytest.fixture
def default_config():
    return build_config(Settings())


@pytest.fixture
def fresh_services():
    service_manager.reset_services()
    yield
    service_manager.reset_services()
