"""Enumerations and index helpers shared by every stage of the model."""

from __future__ import annotations

from enum import Enum


class _Token(str, Enum):
    """String enum parsed case-insensitively from CSV tokens."""

    @classmethod
    def parse(cls, token: str):
        key = token.strip().lower()
        for member in cls:
            if member.value.lower() == key or member.name.lower() == key:
                return member
        aliases = getattr(cls, "_aliases", lambda: {})()
        if key in aliases:
            return cls(aliases[key])
        raise ValueError(f"unknown {cls.__name__} token {token!r}")

    def __str__(self) -> str:
        return self.value


class Population(_Token):
    INCIDENT = "incident"
    PREVALENT = "prevalent"


class CancerType(_Token):
    NSCLC = "NSCLC"
    SCLC = "SCLC"


class Stage(_Token):
    I = "I"  # noqa: E741
    II = "II"
    III = "III"
    IV = "IV"
    LIMITED = "limited"
    EXTENDED = "extended"

    @staticmethod
    def _aliases():
        return {"extensive": "extended", "1": "I", "2": "II", "3": "III", "4": "IV"}


class StageClass(_Token):
    LOCALIZED = "localized"
    METASTATIC = "metastatic"


class Sex(_Token):
    MALE = "male"
    FEMALE = "female"

    @staticmethod
    def _aliases():
        return {"m": "male", "men": "male", "f": "female", "women": "female"}


class Phase(_Token):
    DIAGNOSIS = "diagnosis_staging"
    TREATMENT = "treatment_followup"


class Category(_Token):
    DIAGNOSIS = "diagnosis"
    SURGERY = "surgery"
    RADIOTHERAPY = "radiotherapy"
    DRUGS = "drugs"
    DRUG_ADMINISTRATION = "drug_administration"
    CONSULTATION_LAB_FOLLOWUP = "consultation_lab_followup"
    HOSPITALIZATION = "hospitalization"
    ADVERSE_EVENTS = "adverse_events"
    PALLIATIVE = "palliative"


# categories a unit-cost row may carry; drugs and AEs are costed separately
RESOURCE_CATEGORIES = frozenset(Category) - {Category.DRUGS, Category.ADVERSE_EVENTS}


class RegimenClass(_Token):
    ALK = "ALK"
    ANTI_EGFR = "antiEGFR"
    IMMUNOTHERAPY = "immunotherapy"
    CHEMOTHERAPY = "chemotherapy"
    NONE = "none"  # no systemic therapy in the year; carries no AE risk


class Sector(_Token):
    PUBLIC = "public"
    SOCIAL_SECURITY = "social_security"
    PRIVATE = "private"

    @staticmethod
    def _aliases():
        return {"social": "social_security"}


SECTORS = (Sector.PUBLIC, Sector.SOCIAL_SECURITY, Sector.PRIVATE)
SEXES = (Sex.MALE, Sex.FEMALE)
POPULATIONS = (Population.INCIDENT, Population.PREVALENT)
STAGES = {
    CancerType.NSCLC: (Stage.I, Stage.II, Stage.III, Stage.IV),
    CancerType.SCLC: (Stage.LIMITED, Stage.EXTENDED),
}
# (type, stage) pairs in report order
TUMOURS = tuple((t, s) for t, stages in STAGES.items() for s in stages)
YEARS = (1, 2, 3, 4, 5)


def stage_class(cancer_type: CancerType, stage: Stage) -> StageClass:
    if stage not in STAGES[cancer_type]:
        raise ValueError(f"stage {stage} is not valid for {cancer_type}")
    if stage in (Stage.IV, Stage.EXTENDED):
        return StageClass.METASTATIC
    return StageClass.LOCALIZED
