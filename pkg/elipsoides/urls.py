# elipsoides/urls.py
from django.urls import path

from .api_public import CertificateVerifyView, HealthView, MveView, ReachView

urlpatterns = [
    # =========================================================
    # API PÚBLICA
    # =========================================================
    path("api/mve/", MveView.as_view(), name="api_mve"),
    path("api/certificate/verify/", CertificateVerifyView.as_view(), name="api_certificate_verify"),
    path("api/reach/", ReachView.as_view(), name="api_reach"),
    path("api/health/", HealthView.as_view(), name="api_health"),
]
