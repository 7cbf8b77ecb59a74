# elipsoides/api_public.py
from __future__ import annotations

import logging
import time

import django
import numpy as np
import rest_framework
import scipy
from rest_framework import permissions, status
from rest_framework.response import Response
from rest_framework.views import APIView

from . import reachability
from .geometry import GeometryError
from .logdet_sdp import SdpError, SolverSettings
from .mve_baselines import METHODS, run_method
from .mve_copositive import MveError, verify_certificate
from .parallel import rng_label
from .serializers import (
    MveRequestSerializer,
    MveResultSerializer,
    ReachRequestSerializer,
    ReachStepSerializer,
    VerifyRequestSerializer,
)

logger = logging.getLogger(__name__)

SOLVER_ERRORS = (MveError, SdpError, GeometryError, reachability.ReachabilityError, ArithmeticError)


# ======================================================================
# BASE
# ======================================================================
class PublicAPIView(APIView):
    authentication_classes: list = []
    permission_classes = [permissions.AllowAny]


def _unprocessable(e: Exception) -> Response:
    logger.warning("falha do resolvedor: %s", e)
    return Response({"detail": str(e)}, status=status.HTTP_422_UNPROCESSABLE_ENTITY)


# ======================================================================
# MVE
# ======================================================================
class MveView(PublicAPIView):
    def post(self, request, *args, **kwargs):
        ser = MveRequestSerializer(data=request.data)
        if not ser.is_valid():
            return Response(ser.errors, status=status.HTTP_400_BAD_REQUEST)
        data = ser.validated_data
        settings = SolverSettings.from_settings().with_tol(data.get("tol"))
        try:
            result = run_method(data["set"], data["method"], settings)
        except SOLVER_ERRORS as e:
            return _unprocessable(e)
        logger.info("api mve: método %s, K=%s, volume %.6g", result.method, result.ellipsoid.K, result.ellipsoid.volume)
        return Response(MveResultSerializer(result).data)


class CertificateVerifyView(PublicAPIView):
    def post(self, request, *args, **kwargs):
        ser = VerifyRequestSerializer(data=request.data)
        if not ser.is_valid():
            return Response(ser.errors, status=status.HTTP_400_BAD_REQUEST)
        data = ser.validated_data
        kwargs = {"tol": data["tol"]} if data.get("tol") is not None else {}
        try:
            report = verify_certificate(data["set"], data["ellipsoid"], data["certificate"], **kwargs)
        except SOLVER_ERRORS as e:
            return _unprocessable(e)
        return Response(report.to_dict())


# ======================================================================
# ALCANÇABILIDADE
# ======================================================================
class ReachView(PublicAPIView):
    def post(self, request, *args, **kwargs):
        ser = ReachRequestSerializer(data=request.data)
        if not ser.is_valid():
            return Response(ser.errors, status=status.HTTP_400_BAD_REQUEST)
        T = ser.validated_data["T"]
        settings = SolverSettings.from_settings().with_tol(ser.validated_data.get("tol"))
        started = time.perf_counter()
        try:
            ellipsoids = reachability.run_example(T, settings)
        except SOLVER_ERRORS as e:
            return _unprocessable(e)
        steps = [{"t": t, "ellipsoid": E} for t, E in enumerate(ellipsoids, start=1)]
        return Response({
            "T": T,
            "system": reachability.example_system().to_dict(),
            "steps": ReachStepSerializer(steps, many=True).data,
            "wall_time": time.perf_counter() - started,
        })


# ======================================================================
# SAÚDE
# ======================================================================
class HealthView(PublicAPIView):
    def get(self, request):
        return Response({
            "ok": True,
            "versions": {
                "django": django.get_version(),
                "djangorestframework": rest_framework.VERSION,
                "numpy": np.__version__,
                "scipy": scipy.__version__,
            },
            "rng": rng_label(),
            "methods": list(METHODS),
            "solver": SolverSettings.from_settings().to_dict(),
        })
