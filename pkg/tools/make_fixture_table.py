"""Regenerate src/swemls/data/systems.tsv (the shipped mini-KG source table)."""
from pathlib import Path

from swemls.ingest import load_config, write_table

DATA = Path(__file__).resolve().parents[1] / "src" / "swemls" / "data"

DOCS = {"doc_infrastructure": "yes", "doc_provenance": "yes", "doc_evaluation": "yes"}
KGC = {"domain": "General", "task": "KG Completion", "publication_type": "Conference",
       "maturity": "Low", "training_type": "Self-supervised", "symbol_usage": "Complex Structure"}
MED = {"domain": "Medicine Health", "task": "Patient Diagnosis Prediction", "publication_type": "Conference",
       "maturity": "Low", "symbol_usage": "Hierarchy"}

ROWS = [
    dict(title="Context-Aware Embeddings for Automatic Art Analysis", year="2019", venue="ICMR",
         publication_type="Conference", keywords="art classification,knowledge graph,cross-modal retrieval",
         task="Image and Video", domain="Human Culture and Education", maturity="Low",
         training_type="Supervised", symbol_usage="Complex Structure", pattern="T-3",
         statistical_models="CNN,Encoder", ML1="CNN", ML2="Encoder", SW_source1="Custom KG",
         Data_source1="External Data", Data_generated1="Vectorized KG", SW_final1="Predicted Links", **DOCS),
    dict(title="GRAM: Graph-Based Attention Model for Healthcare Representation Learning", year="2017",
         training_type="Self-supervised", pattern="F2", statistical_models="Attention,GloVe,MLP,RNN",
         ML1="Attention,GloVe,MLP,RNN", SW_source1="CCS", Data_source1="EHR Data",
         SW_final1="Diagnosis Codes", **MED, **DOCS),
    dict(title="Guiding supervised learning by bio-ontologies in medical data analysis", year="2018",
         training_type="Self-supervised", pattern="F2", statistical_models="ARM", ML1="ARM",
         SW_source1="UMLS", Data_source1="EHR Data", SW_final1="Diagnosis Codes", **MED, **DOCS),
    dict(title="KAME: Knowledge-based attention model for diagnosis prediction in healthcare", year="2018",
         training_type="Supervised", pattern="F2",
         statistical_models="Graph-based Attention Model,Knowledge Attention,Gated Recurrent Unit (GRU)",
         ML1="Graph-based Attention Model,Knowledge Attention,Gated Recurrent Unit (GRU)",
         SW_source1="ICD", Data_source1="EHR Data", SW_final1="Diagnosis Codes", **MED, **DOCS),
    dict(title="Improving rare disease classification using imperfect knowledge graph", year="2019",
         training_type="Supervised", pattern="F2", statistical_models="SVM", ML1="SVM",
         SW_source1="DBpedia", Data_source1="Clinical Notes", SW_final1="Diagnosis Codes", **MED),
    dict(title="Jointly embedding knowledge graphs ...", year="2016", pattern="F4", statistical_models="TransX",
         ML1="TransX", SW_source1="FB122,WN18", SW_source2="Logical Rules", SW_final1="Completed KG", **KGC, **DOCS),
    dict(title="Probabilistic Belief Embedding ...", year="2016", pattern="F2", statistical_models="TransX",
         ML1="TransX", SW_source1="FB_500K,NELL", Data_source1="Text Corpus", SW_final1="Completed KG", **KGC),
    dict(title="Learning Knowledge Embeddings by Combining Limit-Based Scoring Loss", year="2017", pattern="A1",
         statistical_models="TransX", ML1="TransX", SW_source1="FB13,FB15k", SW_final1="Completed KG", **KGC, **DOCS),
    dict(title="Knowledge Graph Embedding via ...", year="2018", pattern="A1", statistical_models="CNN,TransX",
         ML1="CNN,TransX", SW_source1="FB15k", SW_final1="Completed KG", **KGC, **DOCS),
    dict(title="Representation Learning of ...", year="2019", pattern="F3", statistical_models="TransX",
         ML1="TransX", KR1="Reasoner", SW_source1="FB15k,WN18", Data_source1="Questions",
         SW_generated1="Entity Embeddings", SW_final1="Answers",
         **{**KGC, "task": "Question Answering"}, **DOCS),
]

if __name__ == "__main__":
    config = load_config(DATA / "config.tsv")
    (DATA / "systems.tsv").write_text(write_table(ROWS, config.columns), encoding="utf-8")
    (DATA / "fixtures").mkdir(exist_ok=True)
    (DATA / "fixtures" / "garcia.tsv").write_text(write_table(ROWS[:1], config.columns), encoding="utf-8")
