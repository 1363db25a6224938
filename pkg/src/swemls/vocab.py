"""Namespaces and the fixed SWeMLS vocabulary."""
from __future__ import annotations

from .terms import IRI

SWEMLS = "https://w3id.org/semsys/ns/swemls#"
RES = "http://semantic-systems.net/swemls/"
PPLAN = "http://purl.org/net/p-plan#"
OPMW = "http://www.opmw.org/ontology/"
RDF = "http://www.w3.org/1999/02/22-rdf-syntax-ns#"
RDFS = "http://www.w3.org/2000/01/rdf-schema#"
XSD = "http://www.w3.org/2001/XMLSchema#"
SKOS = "http://www.w3.org/2004/02/skos/core#"
TERMS = "http://purl.org/dc/terms/"

# Prefix table used for Turtle output, in declaration order.
PREFIXES: dict[str, str] = {
    "swemls": SWEMLS,
    "res": RES,
    "p-plan": PPLAN,
    "opmw": OPMW,
    "rdf": RDF,
    "rdfs": RDFS,
    "xsd": XSD,
    "skos": SKOS,
    "terms": TERMS,
}

# Prefixes a document may use without declaring them (the printed listings
# omit rdf, rdfs, skos and dc-terms).
IMPLICIT_PREFIXES: dict[str, str] = {
    "rdf": RDF,
    "rdfs": RDFS,
    "xsd": XSD,
    "skos": SKOS,
    "terms": TERMS,
    "dcterms": TERMS,
}


def swemls(local: str) -> IRI:
    return IRI(SWEMLS + local)


def res(local: str) -> IRI:
    return IRI(RES + local)


# rdf / rdfs / skos / dc-terms
TYPE = IRI(RDF + "type")
LABEL = IRI(RDFS + "label")
COMMENT = IRI(RDFS + "comment")
BROADER = IRI(SKOS + "broader")
TITLE = IRI(TERMS + "title")

# classes
SYSTEM = swemls("System")
PAPER = swemls("Paper")
SEMANTIC_WEB_RESOURCE = swemls("SemanticWebResource")
DATA_RESOURCE = swemls("DataResource")
PROCESSOR_ML = swemls("ProcessorML")
PROCESSOR_KR = swemls("ProcessorKR")
TEMPLATE_PROCESS_ML = swemls("WorkflowTemplateProcessML")
TEMPLATE_PROCESS_KR = swemls("WorkflowTemplateProcessKR")
TEMPLATE_ARTIFACT_SW = swemls("TemplateArtifactSW")
TEMPLATE_ARTIFACT_DATA = swemls("TemplateArtifactData")
WORKFLOW_TEMPLATE = IRI(OPMW + "WorkflowTemplate")

# workflow template properties
IS_STEP_OF_TEMPLATE = IRI(OPMW + "isStepOfTemplate")
USES = IRI(OPMW + "uses")
IS_GENERATED_BY = IRI(OPMW + "isGeneratedBy")
IS_VARIABLE_OF_TEMPLATE = IRI(OPMW + "isVariableOfTemplate")
# Spelled as printed in the T-3 listing; the upstream P-PLAN term is isPrecededBy.
IS_PRECEDED_BY = IRI(PPLAN + "isPreceededBy")

# paper properties
REPORTS = swemls("reports")
YEAR = swemls("year")
VENUE = swemls("venue")
PUBLICATION_TYPE = swemls("hasPublicationType")
AUTHOR_COUNTRY = swemls("hasAuthorCountry")
KEYWORD = swemls("keyword")
SUMMARY = swemls("summary")
LINK = swemls("link")

# system properties
HAS_APPLICATION_DOMAIN = swemls("hasApplicationDomain")
HAS_TASK = swemls("hasTask")
HAS_MATURITY = swemls("hasMaturity")
HAS_TRAINING_TYPE = swemls("hasTrainingType")
HAS_SYMBOL_USAGE = swemls("hasSymbolUsage")
HAS_STATISTICAL_MODEL = swemls("hasStatisticalModel")
HAS_CORRESPONDING_PATTERN = swemls("hasCorrespondingPattern")
HAS_INFRASTRUCTURE_DOC = swemls("documentsInfrastructure")
HAS_PROVENANCE_DOC = swemls("documentsProvenance")
HAS_EVALUATION_DOC = swemls("documentsEvaluation")
HAS_COMPOUND_ELEMENT = swemls("hasCompoundElement")

# system -> step / variable ("green arrows")
HAS_STEP_ML = swemls("hasStepML")
HAS_STEP_KR = swemls("hasStepKR")
STEP_ORDINAL = swemls("stepOrdinal")
COMPONENT_MODEL = swemls("componentModel")
HAS_SYMBOL_IO = swemls("hasSymbolIO")
HAS_DATA_IO = swemls("hasDataIO")
HAS_INTERMEDIATE = swemls("hasIntermediateVariable")
HAS_OUTPUT = swemls("hasOutputVariable")

# step -> variable ("red arrows", materialised by enrichment)
COMPONENT_INPUT = swemls("componentInput")
COMPONENT_OUTPUT = swemls("componentOutput")

STEP_PREDICATES = {"ML": HAS_STEP_ML, "KR": HAS_STEP_KR}
STEP_CLASSES = {"ML": PROCESSOR_ML, "KR": PROCESSOR_KR}
TEMPLATE_STEP_CLASSES = {"ML": TEMPLATE_PROCESS_ML, "KR": TEMPLATE_PROCESS_KR}
TEMPLATE_VARIABLE_CLASSES = {"SW": TEMPLATE_ARTIFACT_SW, "Data": TEMPLATE_ARTIFACT_DATA}
VARIABLE_CLASSES = {"SW": SEMANTIC_WEB_RESOURCE, "Data": DATA_RESOURCE}

# Role of a variable inside its system, keyed by the linking predicate.
ROLE_PREDICATES = {
    HAS_SYMBOL_IO: "source",
    HAS_DATA_IO: "source",
    HAS_INTERMEDIATE: "generated",
    HAS_OUTPUT: "final",
}

WIRING_PREDICATES = frozenset({COMPONENT_INPUT, COMPONENT_OUTPUT, IS_PRECEDED_BY})

# Namespace (under res:) of the controlled terms each property points at.
TERM_CLASSES: dict[IRI, str] = {
    HAS_APPLICATION_DOMAIN: "Domain",
    HAS_TASK: "Task",
    HAS_MATURITY: "Maturity",
    HAS_TRAINING_TYPE: "TrainingType",
    HAS_SYMBOL_USAGE: "SymbolUsage",
    HAS_STATISTICAL_MODEL: "StatisticalModel",
    HAS_CORRESPONDING_PATTERN: "Pattern",
    PUBLICATION_TYPE: "PublicationType",
    AUTHOR_COUNTRY: "Country",
}

TERM_CLASSES_BY_STEP = {"ML": "StatisticalModel", "KR": "SemanticModel"}
TERM_CLASSES_BY_VARIABLE = {"SW": "Resource", "Data": "Data"}


def all_terms() -> frozenset[IRI]:
    """Every vocabulary constant defined in this module."""
    return frozenset(v for v in globals().values() if isinstance(v, IRI))


def local_name(iri: IRI | str) -> str:
    """Short display form: text after the namespace and any class qualifier.

    ``res:Domain.Medicine_Health`` becomes ``Medicine_Health``.
    """
    value = iri.value if isinstance(iri, IRI) else iri
    for sep in ("#", "/"):
        if sep in value:
            value = value.rsplit(sep, 1)[1]
            break
    return value.rsplit(".", 1)[-1] if "." in value else value
