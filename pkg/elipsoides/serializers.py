# elipsoides/serializers.py
"""
Esquemas JSON dos conjuntos, elipsoides, certificados e resultados.
Usados pela API pública e pelo comando `mve`.
"""
from __future__ import annotations

from rest_framework import serializers

from .geometry import Ellipsoid, GeometryError, Polytope, QuadSet
from .mve_baselines import METHODS
from .mve_copositive import Certificate

REACH_MAX_T = 12


# ======================================================================
# CAMPOS DE DOMÍNIO
# ======================================================================
class _DomainField(serializers.Field):
    """Campo que converte um dict JSON no objeto numérico correspondente."""

    default_error_messages = {
        "not_a_dict": "Esperava um objeto JSON.",
        "invalid": "{message}",
    }

    def parse(self, data: dict):
        raise NotImplementedError

    def to_internal_value(self, data):
        if not isinstance(data, dict):
            self.fail("not_a_dict")
        try:
            return self.parse(data)
        except (GeometryError, KeyError, TypeError, ValueError) as e:
            self.fail("invalid", message=str(e) or e.__class__.__name__)

    def to_representation(self, value):
        return value.to_dict()


class ConvexSetField(_DomainField):
    """Politopo {"S", "t"}; com a chave "quads" vira QuadSet."""

    def parse(self, data: dict):
        if data.get("quads"):
            return QuadSet.from_dict(data)
        if "S" not in data or "t" not in data:
            raise ValueError('politopo precisa de "S" e "t"')
        return Polytope.from_dict(data)


class EllipsoidField(_DomainField):
    def parse(self, data: dict):
        return Ellipsoid.from_dict(data)


class CertificateField(_DomainField):
    def parse(self, data: dict):
        return Certificate.from_dict(data)

    def to_representation(self, value):
        if isinstance(value, list):
            return [c.to_dict() for c in value]
        return value.to_dict()


# ======================================================================
# REQUISIÇÕES
# ======================================================================
class MveRequestSerializer(serializers.Serializer):
    set = ConvexSetField()
    method = serializers.ChoiceField(choices=METHODS, default="cop")
    tol = serializers.FloatField(required=False, allow_null=True, min_value=0.0)

    def validate(self, attrs):
        X = attrs["set"]
        if attrs["method"] == "sproc" and not (isinstance(X, QuadSet) and X.quads):
            raise serializers.ValidationError({"method": "sproc exige ao menos uma linha quadrática em \"quads\"."})
        if attrs["method"] in ("smvie", "ktt", "exact") and isinstance(X, QuadSet) and X.quads:
            raise serializers.ValidationError({"method": f"{attrs['method']} só aceita politopos."})
        return attrs


class VerifyRequestSerializer(serializers.Serializer):
    set = ConvexSetField()
    ellipsoid = EllipsoidField()
    certificate = CertificateField()
    tol = serializers.FloatField(required=False, allow_null=True, min_value=0.0)

    def validate(self, attrs):
        cert = attrs["certificate"]
        K_in = cert.F.shape[0]
        K_out = K_in if cert.lift is None else cert.lift.shape[0]
        if attrs["ellipsoid"].K != K_out:
            raise serializers.ValidationError({"ellipsoid": f"elipsoide em K={attrs['ellipsoid'].K}, certificado em K={K_out}."})
        if attrs["set"].K != K_in or (cert.lift is not None and cert.lift.shape[1] != K_in):
            raise serializers.ValidationError({"certificate": "certificado incompatível com a dimensão do conjunto."})
        return attrs


class ReachRequestSerializer(serializers.Serializer):
    T = serializers.IntegerField(min_value=1, max_value=REACH_MAX_T)
    tol = serializers.FloatField(required=False, allow_null=True, min_value=0.0)


# ======================================================================
# RESPOSTAS
# ======================================================================
class MveResultSerializer(serializers.Serializer):
    method = serializers.CharField()
    ellipsoid = EllipsoidField()
    certificate = CertificateField(allow_null=True)
    objective = serializers.FloatField()
    volume = serializers.FloatField(source="ellipsoid.volume")
    radius = serializers.FloatField(source="ellipsoid.radius")
    wall_time = serializers.FloatField()
    extra = serializers.DictField()


class ReachStepSerializer(serializers.Serializer):
    t = serializers.IntegerField()
    ellipsoid = EllipsoidField()
    volume = serializers.FloatField(source="ellipsoid.volume")
    radius = serializers.FloatField(source="ellipsoid.radius")
