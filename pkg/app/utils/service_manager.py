"""
Global service manager for the verifier.
Services are created once and shared so that their expansion caches are reused
across suites.
"""
from typing import Optional

from app.services.cancellation_service import CancellationService
from app.services.charform_service import CharFormService
from app.services.golden_service import GoldenService
from app.services.lambda_ring_service import LambdaRingService
from app.services.localization_service import LocalizationService
from app.services.ring_service import RingService
from app.services.theta_service import ThetaService
from app.services.verification_service import VerificationService
from app.utils.logger import get_logger

logger = get_logger(__name__)

# Global service instances
_theta_service: Optional[ThetaService] = None
_charform_service: Optional[CharFormService] = None
_cancellation_service: Optional[CancellationService] = None
_lambda_service: Optional[LambdaRingService] = None
_localization_service: Optional[LocalizationService] = None
_golden_service: Optional[GoldenService] = None
_verification_service: Optional[VerificationService] = None


def init_services() -> None:
    """Create and wire every service."""
    global _theta_service, _charform_service, _cancellation_service, _lambda_service
    global _localization_service, _golden_service, _verification_service
    _theta_service = ThetaService()
    _charform_service = CharFormService(_theta_service)
    _cancellation_service = CancellationService(_charform_service, _theta_service)
    _lambda_service = LambdaRingService(_cancellation_service, _charform_service)
    _localization_service = LocalizationService(_cancellation_service, _lambda_service)
    _golden_service = GoldenService(_cancellation_service, _lambda_service)
    _verification_service = VerificationService(
        RingService(),
        _theta_service,
        _charform_service,
        _cancellation_service,
        _lambda_service,
        _localization_service,
        _golden_service,
    )
    logger.info("Global services set successfully")


def is_services_initialized() -> bool:
    return _verification_service is not None


def reset_services() -> None:
    global _theta_service, _charform_service, _cancellation_service, _lambda_service
    global _localization_service, _golden_service, _verification_service
    _theta_service = _charform_service = _cancellation_service = _lambda_service = None
    _localization_service = _golden_service = _verification_service = None


def get_verification_service() -> VerificationService:
    if not is_services_initialized():
        init_services()
    return _verification_service


def get_golden_service() -> GoldenService:
    if not is_services_initialized():
        init_services()
    return _golden_service
