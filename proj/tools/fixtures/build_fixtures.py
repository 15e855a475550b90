#!/usr/bin/env python3
"""Writes the hand-authored fixture sources under data/ and tests/fixtures/.

Replay files keyed by request digests are produced afterwards by
evsynth-record from the answer files written here; see regenerate.sh.
"""

import csv
import json
import pathlib

ROOT = pathlib.Path(__file__).resolve().parents[2]
DATA = ROOT / "data"
FIXTURES = ROOT / "tests" / "fixtures"


def write_json(path, document):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(document, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")


def outcome(measure, description="", time_frame=""):
    return {"measure": measure, "description": description, "timeFrame": time_frame}


def study(nct, title, *, summary="", eligibility="", conditions=(), interventions=(),
          study_type="INTERVENTIONAL", allocation="RANDOMIZED", phases=("PHASE3",),
          enrollment=None, status="COMPLETED", has_results=True, primary=(), secondary=(),
          adverse_events="", references=()):
    design = {"studyType": study_type, "phases": list(phases)}
    if allocation:
        design["designInfo"] = {"allocation": allocation}
    if enrollment is not None:
        design["enrollmentInfo"] = {"count": enrollment, "type": "ACTUAL"}
    record = {
        "protocolSection": {
            "identificationModule": {"nctId": nct, "briefTitle": title},
            "statusModule": {"overallStatus": status},
            "descriptionModule": {"briefSummary": summary},
            "conditionsModule": {"conditions": list(conditions)},
            "designModule": design,
            "armsInterventionsModule": {
                "interventions": [{"type": k, "name": n} for k, n in interventions]
            },
            "outcomesModule": {
                "primaryOutcomes": list(primary),
                "secondaryOutcomes": list(secondary),
            },
            "eligibilityModule": {"eligibilityCriteria": eligibility},
            "referencesModule": {"references": [{"citation": r} for r in references]},
        },
        "hasResults": has_results,
    }
    if adverse_events:
        record["resultsSection"] = {"adverseEventsModule": {"description": adverse_events}}
    return record


def bullets(*items):
    return "\n".join("* " + item for item in items)


def criteria(inclusion, exclusion, inclusion_heading="Inclusion Criteria:",
             exclusion_heading="Exclusion Criteria:"):
    return (f"{inclusion_heading}\n\n{bullets(*inclusion)}\n\n"
            f"{exclusion_heading}\n\n{bullets(*exclusion)}\n")


# --- olaparib -----------------------------------------------------------------

GOLAN = criteria(
    [
        "Histologically or cytologically confirmed pancreas adenocarcinoma receiving initial "
        "chemotherapy for metastatic disease and without evidence of disease progression on treatment.",
        "Patients with measurable disease and/or non-measurable or no evidence of disease assessed at "
        "baseline by CT (or MRI where CT is contraindicated) will be entered in this study.",
        "Documented mutation in gBRCA1 or gBRCA2 that is predicted to be deleterious or suspected "
        "deleterious.",
        "Patients are on treatment with a first line platinum-based (cisplatin, carboplatin or "
        "oxaliplatin) regimen for metastatic pancreas cancer, have received a minimum of 16 weeks of "
        "continuous platinum treatment, and have no evidence of progression based on investigator's "
        "opinion.",
        "Patients who have received platinum as potentially curative treatment for a prior cancer "
        "(e.g., ovarian cancer) or as adjuvant/neoadjuvant treatment for pancreas cancer are eligible, "
        "provided at least 12 months have elapsed between the last dose of platinum-based treatment "
        "and initiation of the platinum-based chemotherapy for metastatic pancreas cancer.",
    ],
    [
        "gBRCA1 and/or gBRCA2 mutations that are considered to be non-detrimental (e.g., \"Variants of "
        "uncertain clinical significance\" or \"Variant of unknown significance\" or \"Variant, favour "
        "polymorphism\" or \"benign polymorphism\" etc).",
        "Progression of tumour between start of first line platinum-based chemotherapy for metastatic "
        "pancreas cancer and randomisation.",
        "Cytotoxic chemotherapy or non-hormonal targeted therapy within 28 days of Cycle 1 Day 1 is not "
        "permitted.",
        "Exposure to an investigational product within 30 days or 5 half lives (whichever is longer) "
        "prior to randomisation.",
        "Any previous treatment with a PARP inhibitor, including Olaparib.",
    ],
    "Key Inclusion Criteria:",
    "Major Exclusion Criteria:",
)

LEDERMANN = criteria(
    [
        "Female patients with histologically diagnosed serous ovarian cancer or recurrent serous "
        "ovarian cancer.",
        "Patients must have completed at least 2 previous courses of platinum containing therapy; the "
        "patient must have been platinum sensitive to the penultimate chemo regimen.",
        "For the last chemotherapy course prior to enrolment on the study, patients must have "
        "demonstrated an objective stable maintained response (partial or complete response) and this "
        "response needs to be maintained until completion of chemotherapy.",
        "Patients must be treated on the study within 8 wks of completion of their final dose of the "
        "platinum containing regimen.",
    ],
    [
        "Previous treatment with PARP inhibitors including AZD2281.",
        "Patients with low grade ovarian carcinoma.",
        "Patients who have had drainage of their ascites during the final 2 cycles of their last "
        "chemotherapy regimen prior to enrolment on the study.",
        "Patients receiving any chemotherapy, radiotherapy (except for palliative reasons), within 2 "
        "weeks from the last dose prior to study entry (or a longer period depending on the defined "
        "characteristics of the agents used).",
    ],
)

MOORE = criteria(
    [
        "Female patients with newly diagnosed, histologically confirmed, high risk advanced (FIGO "
        "stage III - IV) BRCA mutated high grade serous or high grade endometrioid ovarian cancer, "
        "primary peritoneal cancer and / or fallopian - tube cancer who have completed first line "
        "platinum based chemotherapy (intravenous or intraperitoneal).",
        "Stage III patients must have had one attempt at optimal debulking surgery (upfront or "
        "interval debulking). Stage IV patients must have had either a biopsy and/or upfront or "
        "interval debulking surgery.",
        "Documented mutation in BRCA1 or BRCA2 that is predicted to be deleterious or suspected "
        "deleterious (known or predicted to be detrimental/lead to loss of function).",
        "Patients who have completed first line platinum (e.g. carboplatin or cisplatin), containing "
        "therapy (intravenous or intraperitoneal) prior to randomisation:",
        "Patients must have, in the opinion of the investigator, clinical complete response or partial "
        "response and have no clinical evidence of disease progression on the post treatment scan or "
        "rising CA-125 level, following completion of this chemotherapy course. Patients with stable "
        "disease on the post-treatment scan at completion of first line platinum-containing therapy "
        "are not eligible for the study.",
        "Patients must be randomized within 8 weeks of their last dose of chemotherapy.",
    ],
    [
        "BRCA1 and/or BRCA2 mutations that are considered to be non detrimental (e.g. \"Variants of "
        "uncertain clinical significance\" or \"Variant of unknown significance\" or \"Variant, favor "
        "polymorphism\" or \"benign polymorphism\" etc).",
        "Patients with early stage disease (FIGO Stage I, IIA, IIB or IIC).",
        "Stable disease or progressive disease on the post-treatment scan or clinical evidence of "
        "progression at the end of the patient's first line chemotherapy treatment.",
        "Patients where more than one debulking surgery has been performed before randomisation to the "
        "study. (Patients who, at the time of diagnosis, are deemed to be unresectable and undergo only "
        "a biopsy or oophorectomy but then go on to receive chemotherapy and interval debulking surgery "
        "are eligible).",
        "Patients who have previously been diagnosed and treated for earlier stage ovarian, fallopian "
        "tube or primary peritoneal cancer.",
        "Patients who have previously received chemotherapy for any abdominal or pelvic tumour, "
        "including treatment for prior diagnosis at an earlier stage for their ovarian, fallopian tube "
        "or primary peritoneal cancer. (Patients who have received prior adjuvant chemotherapy for "
        "localised breast cancer may be eligible, provided that it was completed more than three years "
        "prior to registration, and that the patient remains free of recurrent or metastatic disease).",
        "Patients with synchronous primary endometrial cancer unless both of the following criteria "
        "are met: 1) stage <2 2) less than 60 years old at the time of diagnosis of endometrial cancer "
        "with stage IA or IB grade 1 or 2, or stage IA grade 3 endometrioid adenocarcinoma OR ≥ 60 years "
        "old at the time of diagnosis of endometrial cancer with Stage IA grade 1 or 2 endometrioid "
        "adenocarcinoma. Patients with serous or clear cell adenocarcinoma or carcinosarcoma of the "
        "endometrium are not eligible.",
    ],
)

PUJADE = criteria(
    [
        "Patients must be ≥ 18 years of age.",
        "Female patients with histologically diagnosed relapsed high grade serous ovarian cancer "
        "(including primary peritoneal and / or fallopian tube cancer) or high grade endometrioid "
        "cancer.",
        "Documented mutation in BRCA1 or BRCA2 that is predicted to be deleterious or suspected "
        "deleterious (known or predicted to be detrimental/lead to loss of function).",
        "Patients who have received at least 2 previous lines of platinum containing therapy prior to "
        "randomisation.",
        "For the penultimate chemotherapy course prior to enrolment on the study:",
        "Patient defined as platinum sensitive after this treatment; defined as disease progression "
        "greater than 6 months after completion of their last dose of platinum chemotherapy.",
        "For the last chemotherapy course immediately prior to randomisation on the study:",
        "Patients must be, in the opinion of the investigator, in response (partial or complete "
        "radiological response), or may have no evidence of disease (if optimal cytoreductive surgery "
        "was conducted prior to chemotherapy), and no evidence of a rising CA-125, following completion "
        "of this chemotherapy course.",
        "Patient must have received a platinum based chemotherapy regimen (e.g. carboplatin or "
        "cisplatin) and have received at least 4 cycles of treatment.",
        "Patients must be randomized within 8 weeks of their last dose of chemotherapy.",
        "Maintenance treatment is allowed at the end of the penultimate platinum regimen, including "
        "bevacizumab.",
    ],
    [
        "Involvement in the planning and/or conduct of the study (applies to both AstraZeneca staff "
        "and/or staff at the study site).",
        "BRCA 1 and/or BRCA2 mutations that are considered to be non detrimental (e.g., \"Variants of "
        "uncertain clinical significance\" or \"Variant of unknown significance\" or \"Variant, favor "
        "polymorphism\" or \"benign polymorphism\" etc.)",
        "Patients who have had drainage of their ascites during the final 2 cycles of their last "
        "chemotherapy regimen prior to enrolment on the study.",
    ],
)

SOLO3 = criteria(
    [
        "Female patients with relapsed high grade serous or high grade endometrioid ovarian cancer, "
        "primary peritoneal cancer and / or fallopian tube cancer.",
        "Documented germline mutation in BRCA1 or BRCA2 that is predicted to be deleterious or "
        "suspected deleterious.",
        "Patients who have received at least 2 prior lines of platinum based chemotherapy and are "
        "platinum sensitive.",
    ],
    [
        "Previous treatment with a PARP inhibitor, including olaparib.",
        "Patients with platinum refractory disease.",
    ],
)

AE_OUTCOME = outcome("Number of participants with adverse events",
                     "Adverse events graded by CTCAE", "Up to 3 years")

OLAPARIB_STUDIES = [
    ("Golan 2019", study(
        "NCT02184195", "Olaparib maintenance in gBRCA mutated metastatic pancreatic cancer",
        summary="Randomised, double-blind, placebo-controlled trial of maintenance olaparib "
                "monotherapy in patients with germline BRCA mutated metastatic pancreatic cancer "
                "whose disease has not progressed on first line platinum based chemotherapy.",
        eligibility=GOLAN, conditions=["Pancreatic Cancer"],
        interventions=[("DRUG", "Olaparib"), ("DRUG", "Placebo")], enrollment=154,
        primary=[outcome("Progression-free survival", "Time from randomisation to progression",
                         "Up to 4 years")],
        secondary=[outcome("Overall survival", "", "Up to 6 years"), AE_OUTCOME],
        adverse_events="Adverse events were collected from first dose until 30 days after the last dose.",
        references=["Maintenance olaparib for germline BRCA-mutated metastatic pancreatic cancer. 2019."])),
    ("Ledermann 2014", study(
        "NCT00753545", "Olaparib maintenance monotherapy in platinum sensitive serous ovarian cancer",
        summary="Randomised, double-blind, placebo-controlled phase II study of olaparib maintenance "
                "monotherapy in patients with platinum sensitive relapsed serous ovarian cancer.",
        eligibility=LEDERMANN, conditions=["Ovarian Neoplasms"],
        interventions=[("DRUG", "Olaparib"), ("DRUG", "Placebo")], phases=["PHASE2"], enrollment=265,
        primary=[outcome("Progression-free survival", "RECIST progression or death", "Up to 3 years")],
        secondary=[outcome("Overall survival", "", "Up to 6 years"), AE_OUTCOME],
        adverse_events="Adverse events were recorded throughout treatment and for 30 days after.",
        references=["Olaparib maintenance therapy in platinum-sensitive relapsed ovarian cancer. 2012."])),
    ("Moore 2018", study(
        "NCT01844986", "Olaparib maintenance monotherapy in newly diagnosed BRCA mutated ovarian cancer",
        summary="Randomised, double-blind, placebo-controlled study of olaparib maintenance "
                "monotherapy in patients with BRCA mutated advanced ovarian cancer following first "
                "line platinum based chemotherapy.",
        eligibility=MOORE, conditions=["Ovarian Cancer"],
        interventions=[("DRUG", "Olaparib"), ("DRUG", "Placebo")], enrollment=391,
        status="ACTIVE_NOT_RECRUITING",
        primary=[outcome("Progression-free survival", "Investigator assessed", "Up to 7 years")],
        secondary=[outcome("Overall survival", "", "Up to 10 years"), AE_OUTCOME],
        adverse_events="Adverse events were collected until 30 days after discontinuation.",
        references=["Maintenance olaparib in patients with newly diagnosed advanced ovarian cancer. 2018."])),
    ("Pujade-Lauraine 2017", study(
        "NCT01874353", "Olaparib maintenance monotherapy in platinum sensitive relapsed BRCA mutated "
                       "ovarian cancer",
        summary="Randomised, double-blind, placebo-controlled study of olaparib maintenance "
                "monotherapy in patients with platinum sensitive relapsed BRCA mutated ovarian "
                "cancer in complete or partial response following platinum based chemotherapy.",
        eligibility=PUJADE, conditions=["Ovarian Cancer"],
        interventions=[("DRUG", "Olaparib"), ("DRUG", "Placebo")], enrollment=295,
        primary=[outcome("Progression-free survival", "Investigator assessed", "Up to 5 years")],
        secondary=[outcome("Overall survival", "", "Up to 8 years"), AE_OUTCOME],
        adverse_events="Adverse events were collected until 30 days after the last dose.",
        references=["Olaparib tablets as maintenance therapy in platinum-sensitive relapsed ovarian "
                    "cancer and a BRCA1/2 mutation. 2017."])),
    ("Penson 2020", study(
        "NCT02282020", "Olaparib versus chemotherapy in gBRCA mutated platinum sensitive relapsed "
                       "ovarian cancer",
        summary="Randomised, open label study comparing olaparib treatment with physician's choice "
                "single agent non-platinum chemotherapy in germline BRCA mutated ovarian cancer "
                "after two or more prior lines of platinum based chemotherapy.",
        eligibility=SOLO3, conditions=["Ovarian Cancer"],
        interventions=[("DRUG", "Olaparib"), ("DRUG", "Pegylated liposomal doxorubicin"),
                       ("DRUG", "Paclitaxel"), ("DRUG", "Gemcitabine"), ("DRUG", "Topotecan")],
        enrollment=266,
        primary=[outcome("Objective response rate", "Blinded independent central review", "Up to 3 years")],
        secondary=[outcome("Progression-free survival", "", "Up to 3 years"), AE_OUTCOME],
        adverse_events="Adverse events were collected until 30 days after the last dose.",
        references=["Olaparib versus nonplatinum chemotherapy in patients with platinum-sensitive "
                    "relapsed ovarian cancer and a germline BRCA1/2 mutation. 2020."])),
]

TABLES = [
    ("Golan 2019", "NCT02184195", 18, 91, 9, 60, 0.0),
    ("Moore 2018", "NCT01844986", 104, 260, 19, 130, 2.8),
    ("Ledermann 2014", "NCT00753545", 43, 136, 18, 128, 1.8),
    ("Pujade-Lauraine 2017", "NCT01874353", 73, 195, 19, 99, 2.8),
]

YES_NO = " Return 'Yes' or 'No'. Do not explain your answer."

OLAPARIB_PLANS = {
    "condition": "advanced malignancies",
    "treatment": "maintenance olaparib",
    "plans": [
        {
            "filter_name": "olaparib_intervention",
            "logical_operator": "default",
            "conditions": [{
                "fields_to_attend": ["Interventions"],
                "llm_instruction": "Does the trial investigate olaparib?" + YES_NO,
                "comparison": "equal_to",
                "target_value": "Yes",
            }],
        },
        {
            "filter_name": "reports_adverse_events",
            "logical_operator": "default",
            "conditions": [{
                "fields_to_attend": ["Primary Outcome", "Secondary Outcome", "Adverse Event"],
                "llm_instruction": "Does the trial report adverse events?" + YES_NO,
                "comparison": "equal_to",
                "target_value": "Yes",
            }],
        },
    ],
}

OLAPARIB_COMPARABILITY = {
    "condition": "advanced malignancies",
    "treatment": "maintenance olaparib",
    "plans": [{
        "filter_name": "placebo_controlled_rct",
        "logical_operator": "sequential",
        "conditions": [
            {
                "fields_to_attend": ["Allocation"],
                "llm_instruction": "Is the trial randomized?" + YES_NO,
                "comparison": "equal_to",
                "target_value": "No",
            },
            {
                "fields_to_attend": ["Summary", "Interventions"],
                "llm_instruction": "Name the comparator arm of the trial. Return a short phrase or "
                                   "'None'. Do not explain your answer.",
                "comparison": "presence_match",
                "target_value": "placebo",
            },
        ],
    }],
}

OLAPARIB_ANSWERS = {
    "NCT02184195": {"olaparib_intervention": ["Yes"], "reports_adverse_events": ["Yes"],
                    "placebo_controlled_rct": ["No", "placebo"]},
    "NCT00753545": {"olaparib_intervention": ["Yes"], "reports_adverse_events": ["Yes"],
                    "placebo_controlled_rct": ["No", "placebo"]},
    "NCT01844986": {"olaparib_intervention": ["Yes"], "reports_adverse_events": ["Yes"],
                    "placebo_controlled_rct": ["No", "matching placebo"]},
    "NCT01874353": {"olaparib_intervention": ["Yes"], "reports_adverse_events": ["Yes"],
                    "placebo_controlled_rct": ["No", "placebo tablets"]},
    "NCT02282020": {"olaparib_intervention": ["Yes"], "reports_adverse_events": ["Yes"],
                    "placebo_controlled_rct": ["No", "physician's choice non-platinum chemotherapy"]},
}


def rule(rule_id, severity, description, *matcher):
    return {
        "rule_id": rule_id,
        "description": description,
        "severity": severity,
        "target_relative": True,
        "matcher": [{"field": f, "comparison": c, "target_value": v} for f, c, v in matcher],
    }


PENALTY_RULES = {"rules": [
    rule("R1", 0.9, "Requires completed prior lines of platinum therapy; the target enrolls patients "
                    "on initial chemotherapy for metastatic disease.",
         ("kind", "equal_to", "inclusion"),
         ("entity", "equal_to", "prior-treatment"),
         ("attribute", "equal_to", "completed-platinum-lines")),
    rule("R2", 0.7, "Restricted to female patients with ovarian, fallopian tube or primary peritoneal "
                    "cancer; the target enrolls pancreas adenocarcinoma.",
         ("kind", "equal_to", "inclusion"),
         ("entity", "equal_to", "disease"),
         ("value", "presence_match", ["ovarian", "fallopian", "peritoneal"]),
         ("condition", "presence_match", "female")),
    rule("R3", 0.6, "Requires a response to the last chemotherapy course; the target only requires "
                    "no progression.",
         ("kind", "equal_to", "inclusion"),
         ("entity", "equal_to", "response-status"),
         ("attribute", "equal_to", "response-to-last-chemotherapy")),
    rule("R4", 0.6, "Requires randomization within a fixed window after the last chemotherapy dose.",
         ("entity", "equal_to", "timing"),
         ("attribute", "equal_to", "randomization-window-after-last-chemo")),
    rule("R5", 0.5, "Stable-disease handling at the last course differs from the target, which admits "
                    "measurable or non-measurable disease.",
         ("kind", "equal_to", "inclusion"),
         ("entity", "equal_to", "response-status"),
         ("attribute", "equal_to", "response-to-last-chemotherapy"),
         ("value", "presence_match", "stable")),
]}


# --- gastric ------------------------------------------------------------------

GASTRIC_QUERY = (
    "Identify and evaluate clinical trials on gastric cancer or gastroesophageal junction cancer. "
    "Trials must investigate targeted therapies or immunotherapies, report survival outcomes such "
    "as progression-free survival (PFS) or overall survival (OS), and enroll biomarker-stratified "
    "populations (for example HER2-positive, MSI-H or PD-L1-positive). Exclude Phase III trials with "
    "small enrollment, for example fewer than 100 patients. Only include trials investigating "
    "FDA-approved drugs."
)

GASTRIC_RULES = [
    "Include trials that study gastric cancer or gastroesophageal junction cancer",
    "Include trials that investigate targeted therapies or immunotherapies",
    "Include trials that report survival outcomes such as progression-free survival (PFS) or overall survival (OS)",
    "Include trials that enroll biomarker-stratified populations, including but not limited to HER2-positive, MSI-H, or PD-L1-positive",
    "Exclude Phase III trials with fewer than 100 enrolled patients",
    "Include only trials where the drugs under investigation are FDA-approved",
]


def yes_no_plan(name, fields, question):
    return {
        "filter_name": name,
        "logical_operator": "default",
        "conditions": [{
            "fields_to_attend": fields,
            "llm_instruction": question + YES_NO,
            "comparison": "equal_to",
            "target_value": "Yes",
        }],
    }


GASTRIC_PLANS = [
    yes_no_plan("include_gastric_or_gej_cancer", ["Title", "Conditions"],
                "Does the trial study gastric cancer or gastroesophageal junction cancer?"),
    yes_no_plan("include_targeted_or_immunotherapy", ["Summary", "Interventions"],
                "Does the trial investigate a targeted therapy or an immunotherapy?"),
    yes_no_plan("include_survival_outcomes", ["Primary Outcome", "Secondary Outcome"],
                "Does the trial report progression-free survival or overall survival?"),
    yes_no_plan("include_biomarker_stratified", ["Title", "Summary", "Eligibility"],
                "Does the trial enroll a biomarker-stratified population, such as HER2-positive, "
                "MSI-H or PD-L1-positive patients?"),
    {
        "filter_name": "exclude_phase_iii_fewer_than_100_enrollment",
        "logical_operator": "sequential",
        "conditions": [
            {
                "fields_to_attend": ["Phase"],
                "llm_instruction": "Check if the trial is in Phase III. Return 'Yes' if it is, otherwise "
                                   "return 'No'. Do not explain your answer.",
                "comparison": "equal_to",
                "target_value": "Yes",
            },
            {
                "fields_to_attend": ["Enrollment"],
                "llm_instruction": "Extract the number of enrolled patients. Return a number only. Do not "
                                   "include units or explanations.",
                "comparison": "greater_than",
                "target_value": 100,
            },
        ],
    },
    {
        "filter_name": "fda_approved_drugs_only",
        "logical_operator": "default",
        "conditions": [{
            "fields_to_attend": ["Interventions"],
            "llm_instruction": "Extract and return the names of drugs under investigation as a Python "
                               "list. Do not include any other information.",
            "comparison": "in_list",
            "membership_list_name": "FDA_approved_drugs_gastric",
        }],
    },
]

GASTRIC_PLAN_SET = {
    "condition": "gastric cancer",
    "treatment": "targeted therapy or immunotherapy",
    "membership_lists": {"FDA_approved_drugs_gastric": "gastric cancer"},
    "plans": GASTRIC_PLANS,
}


def drug(generic, *brands, display=None):
    return {"display_name": display or generic.capitalize(), "generic_name": generic,
            "brand_names": list(brands)}


GASTRIC_DRUGS = {
    "disease_key": "gastric cancer",
    "source": "fixture: interventions of the representative gastric landscape trials",
    "retrieved_at": "2026-01-15T00:00:00Z",
    "entries": [
        drug("trastuzumab", "Herceptin", "Ogivri"),
        drug("pembrolizumab", "Keytruda"),
        drug("nivolumab", "Opdivo"),
        drug("fam-trastuzumab deruxtecan-nxki", "Enhertu", "DS-8201a", "trastuzumab deruxtecan",
             display="Trastuzumab deruxtecan"),
        drug("zolbetuximab", "Vyloy", "IMAB362"),
        drug("ramucirumab", "Cyramza"),
        drug("tislelizumab", "Tevimbra"),
        drug("irinotecan", "Camptosar"),
        drug("paclitaxel", "Taxol"),
        drug("docetaxel", "Taxotere"),
        drug("capecitabine", "Xeloda"),
        drug("oxaliplatin", "Eloxatin"),
        drug("cisplatin"),
        drug("fluorouracil", "5-FU"),
        {"display_name": "Regorafenib", "generic_name": "regorafenib", "brand_names": ["Stivarga"],
         "status": "off-label"},
    ],
}

OS_PFS = [outcome("Progression-free survival", "", "Up to 4 years"),
          outcome("Overall survival", "", "Up to 5 years")]


def gastric(nct, title, **kw):
    kw.setdefault("conditions", ["Gastric Cancer"])
    kw.setdefault("primary", OS_PFS)
    kw.setdefault("references", [f"Publication for {nct}."])
    return study(nct, title, **kw)


GASTRIC_STUDIES = [
    gastric("NCT03615326", "Pembrolizumab plus trastuzumab and chemotherapy in HER2-positive gastric cancer",
            summary="Pembrolizumab versus placebo added to trastuzumab and chemotherapy for HER2-positive "
                    "advanced gastric or gastroesophageal junction adenocarcinoma.",
            eligibility=criteria(["HER2-positive gastric or GEJ adenocarcinoma."], ["Prior anti-PD-1 therapy."]),
            interventions=[("BIOLOGICAL", "Pembrolizumab"), ("BIOLOGICAL", "Trastuzumab"), ("DRUG", "Placebo")],
            enrollment=738),
    gastric("NCT03329690", "DS-8201a in HER2-expressing advanced gastric or GEJ adenocarcinoma",
            summary="Trastuzumab deruxtecan versus physician's choice chemotherapy in HER2-positive gastric "
                    "cancer after trastuzumab.",
            eligibility=criteria(["HER2-positive gastric or GEJ adenocarcinoma."], ["Prior DS-8201a."]),
            conditions=["Gastric Cancer", "Gastroesophageal Junction Adenocarcinoma"],
            interventions=[("DRUG", "DS-8201a"), ("DRUG", "Irinotecan"), ("DRUG", "Paclitaxel")],
            phases=["PHASE2"], enrollment=233),
    gastric("NCT03504397", "Zolbetuximab plus mFOLFOX6 in claudin 18.2 positive HER2-negative gastric cancer",
            summary="Zolbetuximab versus placebo with mFOLFOX6 in CLDN18.2-positive, HER2-negative gastric "
                    "or GEJ adenocarcinoma.",
            eligibility=criteria(["Claudin 18.2 positive and HER2-negative tumour."], ["HER2-positive tumour."]),
            conditions=["Stomach Cancer", "GEJ Cancer"],
            interventions=[("DRUG", "Zolbetuximab"), ("DRUG", "Placebo"), ("DRUG", "Oxaliplatin"),
                           ("DRUG", "Fluorouracil")],
            enrollment=565, status="ACTIVE_NOT_RECRUITING"),
    gastric("NCT03653507", "Zolbetuximab plus CAPOX in claudin 18.2 positive gastric cancer",
            summary="Zolbetuximab versus placebo with CAPOX in CLDN18.2-positive, HER2-negative gastric or "
                    "GEJ adenocarcinoma.",
            eligibility=criteria(["Claudin 18.2 positive and HER2-negative tumour."], ["HER2-positive tumour."]),
            conditions=["Gastric Cancer", "GEJ Cancer"],
            interventions=[("DRUG", "Zolbetuximab"), ("DRUG", "Placebo"), ("DRUG", "Capecitabine"),
                           ("DRUG", "Oxaliplatin")],
            enrollment=507, status="ACTIVE_NOT_RECRUITING"),
    gastric("NCT04014075", "Trastuzumab deruxtecan in HER2-positive gastric cancer after trastuzumab",
            summary="Single arm study of trastuzumab deruxtecan in HER2-positive unresectable or metastatic "
                    "gastric or GEJ adenocarcinoma.",
            eligibility=criteria(["HER2-positive disease."], ["Interstitial lung disease."]),
            conditions=["Gastric Cancer", "Gastroesophageal Junction Cancer"],
            interventions=[("DRUG", "Trastuzumab deruxtecan")], allocation="NA", phases=["PHASE2"],
            enrollment=379),
    gastric("NCT04768686", "FLX475 with pembrolizumab in EBV-positive gastric cancer",
            summary="CCR4 antagonist FLX475 combined with pembrolizumab in EBV-positive advanced gastric cancer.",
            eligibility=criteria(["EBV-positive gastric cancer."], ["Prior checkpoint inhibitor."]),
            interventions=[("DRUG", "FLX475"), ("BIOLOGICAL", "Pembrolizumab")], allocation="NA",
            phases=["PHASE2"], enrollment=90),
    gastric("NCT90000001", "Registry of targeted therapy use in gastric cancer",
            summary="Observational registry.", study_type="OBSERVATIONAL", allocation="", phases=[],
            interventions=[], enrollment=1200),
    gastric("NCT90000002", "Nivolumab in PD-L1 positive gastric cancer",
            summary="Nivolumab in PD-L1 positive gastric cancer.", status="RECRUITING",
            interventions=[("DRUG", "Nivolumab")], enrollment=300),
    gastric("NCT90000003", "Ramucirumab pilot in gastric cancer",
            summary="Ramucirumab pilot.", phases=[], interventions=[("DRUG", "Ramucirumab")], enrollment=40),
    gastric("NCT90000004", "Post-marketing trastuzumab study in HER2-positive gastric cancer",
            summary="Post-marketing trastuzumab.", phases=["PHASE4"],
            interventions=[("DRUG", "Trastuzumab")], enrollment=410),
    gastric("NCT90000005", "Pembrolizumab in MSI-H colorectal cancer",
            summary="Pembrolizumab in MSI-H colorectal cancer.", conditions=["Colorectal Cancer"],
            has_results=False, interventions=[("BIOLOGICAL", "Pembrolizumab")], enrollment=307),
    gastric("NCT90000006", "Nivolumab in PD-L1 positive colorectal cancer",
            summary="Nivolumab in PD-L1 positive colorectal cancer.", conditions=["Colon Cancer"],
            interventions=[("DRUG", "Nivolumab")], enrollment=250),
    gastric("NCT90000007", "Docetaxel second line in HER2-positive gastric cancer",
            summary="Docetaxel chemotherapy alone in HER2-positive gastric cancer.",
            interventions=[("DRUG", "Docetaxel")], enrollment=210),
    gastric("NCT90000008", "Ramucirumab response study in gastric cancer",
            summary="Ramucirumab in VEGFR2-high gastric cancer.",
            primary=[outcome("Objective response rate", "", "Up to 2 years")],
            interventions=[("DRUG", "Ramucirumab")], phases=["PHASE2"], enrollment=120),
    gastric("NCT90000009", "Ramucirumab plus paclitaxel in unselected gastric cancer",
            summary="Ramucirumab plus paclitaxel in previously treated gastric cancer, no biomarker selection.",
            interventions=[("DRUG", "Ramucirumab"), ("DRUG", "Paclitaxel")], enrollment=665),
    gastric("NCT90000010", "Small phase III trastuzumab study in HER2-positive gastric cancer",
            summary="Trastuzumab in HER2-positive gastric cancer.",
            interventions=[("BIOLOGICAL", "Trastuzumab"), ("DRUG", "Cisplatin")], enrollment=64),
    gastric("NCT90000011", "Pembrolizumab in MSI-H gastric cancer",
            summary="Pembrolizumab in MSI-H gastric cancer.", interventions=[("BIOLOGICAL", "Pembrolizumab")],
            allocation="NA", phases=["PHASE2"], enrollment=40),
    gastric("NCT90000012", "Nivolumab plus chemotherapy in PD-L1 positive gastric cancer",
            summary="Nivolumab plus chemotherapy in PD-L1 CPS >= 5 gastric cancer.",
            interventions=[("DRUG", "Nivolumab"), ("DRUG", "Oxaliplatin"), ("DRUG", "Capecitabine")],
            enrollment=480),
    gastric("NCT90000013", "Pembrolizumab in MSI-H GEJ adenocarcinoma",
            summary="Pembrolizumab in MSI-H GEJ adenocarcinoma.", conditions=["GEJ Adenocarcinoma"],
            interventions=[("BIOLOGICAL", "Pembrolizumab")], phases=["PHASE2"], enrollment=90),
    gastric("NCT90000014", "Tislelizumab plus chemotherapy in PD-L1 positive gastric cancer",
            summary="Tislelizumab versus placebo plus chemotherapy in PD-L1 positive gastric cancer.",
            interventions=[("DRUG", "Tislelizumab"), ("DRUG", "Placebo"), ("DRUG", "Oxaliplatin")],
            enrollment=997),
]

PLAN_NAMES = [p["filter_name"] for p in GASTRIC_PLANS]

# Hand-labelled parser answers, one list per plan in plan order. A plan stage
# a trial never reaches has no answers.
GASTRIC_ANSWERS = {
    "NCT03615326": [["Yes"], ["Yes"], ["Yes"], ["Yes"], ["Yes", "738"], ["['Pembrolizumab', 'Trastuzumab', 'Placebo']"]],
    "NCT03329690": [["Yes"], ["Yes"], ["Yes"], ["Yes"], ["No"], ["['DS-8201a', 'Irinotecan', 'Paclitaxel']"]],
    "NCT03504397": [["Yes"], ["Yes"], ["Yes"], ["Yes"], ["Yes", "565"], ["['Zolbetuximab', 'Placebo', 'Oxaliplatin', 'Fluorouracil']"]],
    "NCT03653507": [["Yes"], ["Yes"], ["Yes"], ["Yes"], ["Yes", "507"], ["['Zolbetuximab', 'Placebo', 'Capecitabine', 'Oxaliplatin']"]],
    "NCT04014075": [["Yes"], ["Yes"], ["Yes"], ["Yes"], ["No"], ["['Trastuzumab deruxtecan']"]],
    "NCT04768686": [["Yes"], ["Yes"], ["Yes"], ["Yes"], ["No"], ["['FLX475', 'Pembrolizumab']"]],
    "NCT90000005": [["No"]],
    "NCT90000006": [["No"]],
    "NCT90000007": [["Yes"], ["No"]],
    "NCT90000008": [["Yes"], ["Yes"], ["No"]],
    "NCT90000009": [["Yes"], ["Yes"], ["Yes"], ["No"]],
    "NCT90000010": [["Yes"], ["Yes"], ["Yes"], ["Yes"], ["Yes", "64"]],
    "NCT90000011": [["Yes"], ["Yes"], ["Yes"], ["Yes"], ["No"], ["['Pembrolizumab']"]],
    "NCT90000012": [["Yes"], ["Yes"], ["Yes"], ["Yes"], ["Yes", "480"], ["['Nivolumab', 'Oxaliplatin', 'Capecitabine']"]],
    "NCT90000013": [["Yes"], ["Yes"], ["Yes"], ["Yes"], ["No"], ["['Pembrolizumab']"]],
    "NCT90000014": [["Yes"], ["Yes"], ["Yes"], ["Yes"], ["Yes", "997"], ["['Tislelizumab', 'Placebo', 'Oxaliplatin']"]],
}

GASTRIC_LABELS = {
    "prefilter_removed": {
        "NCT90000001": "not-interventional",
        "NCT90000002": "status-not-allowed",
        "NCT90000003": "missing-phase",
        "NCT90000004": "phase-4",
    },
    "plan_removed": {
        "NCT90000005": "include_gastric_or_gej_cancer",
        "NCT90000006": "include_gastric_or_gej_cancer",
        "NCT90000007": "include_targeted_or_immunotherapy",
        "NCT90000008": "include_survival_outcomes",
        "NCT90000009": "include_biomarker_stratified",
        "NCT90000010": "exclude_phase_iii_fewer_than_100_enrollment",
        "NCT04768686": "fda_approved_drugs_only",
    },
    "selected": sorted([
        "NCT03329690", "NCT03504397", "NCT03615326", "NCT03653507", "NCT04014075",
        "NCT90000011", "NCT90000012", "NCT90000013", "NCT90000014",
    ]),
    "flow": {
        "initial_count": 20,
        "stages": [
            {"label": "prefilter", "remaining": 16, "excluded": 4},
            {"label": "include_gastric_or_gej_cancer", "remaining": 14, "excluded": 2},
            {"label": "include_targeted_or_immunotherapy", "remaining": 13, "excluded": 1},
            {"label": "include_survival_outcomes", "remaining": 12, "excluded": 1},
            {"label": "include_biomarker_stratified", "remaining": 11, "excluded": 1},
            {"label": "exclude_phase_iii_fewer_than_100_enrollment", "remaining": 10, "excluded": 1},
            {"label": "fda_approved_drugs_only", "remaining": 9, "excluded": 1},
        ],
        "final_count": 9,
    },
}

# --- prefilter corpus -----------------------------------------------------------

PREFILTER_STUDIES = [
    (study("NCT00000101", "Completed phase 3 with results", phases=["PHASE3"]), "retained"),
    (study("NCT00000102", "Active not recruiting phase 2 with publication", phases=["PHASE2"],
           status="ACTIVE_NOT_RECRUITING", has_results=False, references=["A paper."]), "retained"),
    (study("NCT00000103", "Phase 1/2 completed with results", phases=["PHASE1", "PHASE2"]), "retained"),
    (study("NCT00000104", "Observational cohort", study_type="OBSERVATIONAL", phases=[]), "not-interventional"),
    (study("NCT00000105", "Recruiting phase 3", status="RECRUITING"), "status-not-allowed"),
    (study("NCT00000106", "Phase 2 with publication only", phases=["PHASE2"], has_results=False,
           references=["Another paper."]), "retained"),
    (study("NCT00000107", "No phase given", phases=[]), "missing-phase"),
    (study("NCT00000108", "Phase NA device study", phases=["NA"]), "missing-phase"),
    (study("NCT00000109", "Phase 4 post-marketing", phases=["PHASE4"]), "phase-4"),
    (study("NCT00000110", "Phase 3/4", phases=["PHASE3", "PHASE4"]), "phase-4"),
    (study("NCT00000111", "Completed without results or publications", has_results=False), "no-results-or-publications"),
    (study("NCT00000112", "Early phase 1 completed with results", phases=["EARLY_PHASE1"]), "retained"),
]


# Hand structuring of every split clause: (prefix of the clause, tuple or None).
def a(prefix, entity=None, attribute="", value="", condition=""):
    if entity is None:
        return {"starts_with": prefix, "tuple": None}
    return {"starts_with": prefix, "tuple": {"entity": entity, "attribute": attribute,
                                             "value": value, "condition": condition}}


NON_DETRIMENTAL = "considered non-detrimental (variants of uncertain significance, benign polymorphism)"

CRITERIA_ANNOTATIONS = {
    "NCT02184195": [
        a("Histologically or cytologically", "disease", "histology", "pancreas adenocarcinoma",
          "receiving initial chemotherapy for metastatic disease without evidence of progression"),
        a("Patients with measurable disease", "disease", "measurability",
          "measurable, non-measurable or no evidence of disease", "assessed at baseline by CT or MRI"),
        a("Documented mutation in gBRCA1", "biomarker", "germline-BRCA-mutation", "deleterious"),
        a("Patients are on treatment with a first line", "prior-treatment", "current-first-line-platinum",
          "at least 16 weeks of continuous platinum", "no evidence of progression"),
        a("Patients who have received platinum as potentially", "prior-treatment", "prior-platinum-interval",
          "at least 12 months since last platinum", "curative or adjuvant platinum for a prior cancer"),
        a("gBRCA1 and/or gBRCA2 mutations", "biomarker", "germline-BRCA-mutation", NON_DETRIMENTAL),
        a("Progression of tumour between", "response-status", "progression-before-randomisation",
          "progression on first line platinum"),
        a("Cytotoxic chemotherapy or non-hormonal", "timing", "washout-chemotherapy", "within 28 days",
          "before cycle 1 day 1"),
        a("Exposure to an investigational product", "timing", "washout-investigational-product",
          "within 30 days or 5 half lives"),
        a("Any previous treatment with a PARP", "prior-treatment", "prior-parp-inhibitor", "any"),
    ],
    "NCT00753545": [
        a("Female patients with histologically diagnosed serous", "disease", "histology",
          "serous ovarian cancer or recurrent serous ovarian cancer", "female"),
        a("Patients must have completed at least 2 previous courses", "prior-treatment",
          "platinum-sensitivity", "platinum sensitive to the penultimate regimen",
          "at least 2 previous platinum courses"),
        a("For the last chemotherapy course prior to enrolment", "response-status",
          "response-to-last-chemotherapy", "objective stable maintained response (partial or complete)",
          "maintained until completion of chemotherapy"),
        a("Patients must be treated on the study within 8 wks", "timing",
          "treatment-start-window-after-last-platinum", "within 8 weeks"),
        a("Previous treatment with PARP inhibitors", "prior-treatment", "prior-parp-inhibitor", "any"),
        a("Patients with low grade ovarian carcinoma.", "disease", "grade", "low grade ovarian carcinoma"),
        a("Patients who have had drainage of their ascites", "comorbidity", "ascites-drainage",
          "during the final 2 cycles of the last regimen"),
        a("Patients receiving any chemotherapy, radiotherapy", "timing", "washout-chemotherapy-radiotherapy",
          "within 2 weeks", "except palliative radiotherapy"),
    ],
    "NCT01844986": [
        a("Female patients with newly diagnosed", "disease", "histology",
          "high grade serous or endometrioid ovarian cancer, primary peritoneal and/or fallopian tube "
          "cancer, FIGO stage III-IV, BRCA mutated", "female, newly diagnosed"),
        a("Stage III patients must have had one attempt", "prior-treatment", "debulking-surgery",
          "one attempt at optimal debulking", "stage III"),
        a("Stage IV patients must have had either", "prior-treatment", "debulking-surgery",
          "biopsy and/or debulking surgery", "stage IV"),
        a("Documented mutation in BRCA1 or BRCA2", "biomarker", "BRCA-mutation", "deleterious"),
        a("Patients who have completed first line platinum", "prior-treatment", "completed-platinum-lines",
          "first line platinum completed", "prior to randomisation"),
        a("Patients must have, in the opinion", "response-status", "response-to-last-chemotherapy",
          "complete or partial response", "no evidence of progression or rising CA-125"),
        a("Patients with stable disease on the post-treatment", "response-status", "post-treatment-scan",
          "stable disease", "not eligible"),
        a("Patients must be randomized within 8 weeks", "timing", "randomization-window-after-last-chemo",
          "within 8 weeks"),
        a("BRCA1 and/or BRCA2 mutations that are", "biomarker", "BRCA-mutation", NON_DETRIMENTAL),
        a("Patients with early stage disease", "disease", "stage", "FIGO stage I to IIC"),
        a("Stable disease or progressive disease", "response-status", "response-to-last-chemotherapy",
          "stable or progressive disease", "at the end of first line chemotherapy"),
        a("Patients where more than one debulking", "prior-treatment", "debulking-surgery",
          "more than one debulking surgery"),
        a("Patients who have previously been diagnosed", "disease", "prior-diagnosis",
          "earlier stage ovarian, fallopian tube or primary peritoneal cancer"),
        a("Patients who have previously received chemotherapy", "prior-treatment", "prior-chemotherapy",
          "abdominal or pelvic tumour", "adjuvant breast chemotherapy over three years ago allowed"),
        a("Patients with synchronous primary endometrial", "comorbidity", "synchronous-endometrial-cancer",
          "present", "unless early stage and low grade"),
        a("Patients with serous or clear cell", "comorbidity", "endometrial-histology",
          "serous, clear cell or carcinosarcoma"),
    ],
    "NCT01874353": [
        a("Patients must be ≥ 18 years", "demographics", "age", ">= 18 years"),
        a("Female patients with histologically diagnosed relapsed", "disease", "histology",
          "relapsed high grade serous ovarian cancer (including primary peritoneal and/or fallopian tube "
          "cancer) or high grade endometrioid cancer", "female"),
        a("Documented mutation in BRCA1 or BRCA2", "biomarker", "BRCA-mutation", "deleterious"),
        a("Patients who have received at least 2 previous lines", "prior-treatment",
          "completed-platinum-lines", "at least 2", "prior to randomisation"),
        a("For the penultimate chemotherapy course"),
        a("Patient defined as platinum sensitive", "prior-treatment", "platinum-sensitivity",
          "progression more than 6 months after last platinum", "penultimate course"),
        a("For the last chemotherapy course immediately"),
        a("Patients must be, in the opinion", "response-status", "response-to-last-chemotherapy",
          "partial or complete radiological response, or no evidence of disease",
          "no rising CA-125"),
        a("Patient must have received a platinum based", "prior-treatment", "last-regimen-platinum",
          "at least 4 cycles", "last course"),
        a("Patients must be randomized within 8 weeks", "timing", "randomization-window-after-last-chemo",
          "within 8 weeks"),
        a("Maintenance treatment is allowed", "prior-treatment", "maintenance-after-penultimate",
          "allowed, including bevacizumab"),
        a("Involvement in the planning"),
        a("BRCA 1 and/or BRCA2 mutations", "biomarker", "BRCA-mutation", NON_DETRIMENTAL),
        a("Patients who have had drainage", "comorbidity", "ascites-drainage",
          "during the final 2 cycles of the last regimen"),
    ],
    "NCT02282020": [
        a("Female patients with relapsed high grade", "disease", "histology",
          "relapsed high grade serous or endometrioid ovarian, primary peritoneal and/or fallopian tube "
          "cancer", "female"),
        a("Documented germline mutation", "biomarker", "germline-BRCA-mutation", "deleterious"),
        a("Patients who have received at least 2 prior lines", "prior-treatment", "completed-platinum-lines",
          "at least 2", "platinum sensitive"),
        a("Previous treatment with a PARP", "prior-treatment", "prior-parp-inhibitor", "any"),
        a("Patients with platinum refractory", "prior-treatment", "platinum-sensitivity", "refractory"),
    ],
}


def main():
    # olaparib
    write_json(DATA / "olaparib" / "registry.json", [s for _, s in OLAPARIB_STUDIES])
    write_json(DATA / "olaparib" / "study_labels.json",
               {s["protocolSection"]["identificationModule"]["nctId"]: label for label, s in OLAPARIB_STUDIES})
    with open(DATA / "olaparib" / "tables.csv", "w", newline="", encoding="utf-8") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(["study_id", "nct_id", "events_trt", "total_trt", "events_ctl", "total_ctl", "penalty"])
        for row in TABLES:
            out.writerow(row)
    write_json(DATA / "olaparib" / "plans.json", OLAPARIB_PLANS)
    write_json(DATA / "olaparib" / "comparability_plan.json", OLAPARIB_COMPARABILITY)
    write_json(DATA / "olaparib" / "plan_answers.json", OLAPARIB_ANSWERS)
    write_json(DATA / "olaparib" / "penalty_rules.json", PENALTY_RULES)
    write_json(DATA / "olaparib" / "criteria_annotations.json", CRITERIA_ANNOTATIONS)
    write_json(DATA / "olaparib" / "sweep_grid.json",
               {"gamma": [0.25, 0.5, 1.0, 2.0], "floor": [10, 20, 50, 100],
                "pmax_mode": ["attainable", "observed"]})

    # gastric
    write_json(DATA / "gastric" / "plans.json", GASTRIC_PLAN_SET)
    write_json(DATA / "gastric" / "drug_import.json", GASTRIC_DRUGS)
    write_json(DATA / "gastric" / "query.json", {"query": GASTRIC_QUERY, "rules": GASTRIC_RULES})
    write_json(DATA / "gastric" / "generation_answers.json", {
        "rules": {GASTRIC_QUERY: "\n".join(f"({n}) {r}" for n, r in
                                           zip(["i", "ii", "iii", "iv", "v", "vi"], GASTRIC_RULES))},
        "plan": {r: json.dumps(p, indent=2) for r, p in zip(GASTRIC_RULES, GASTRIC_PLANS)},
    })

    # test fixtures
    write_json(FIXTURES / "gastric_corpus.json", GASTRIC_STUDIES)
    answers = {}
    for nct, per_plan in GASTRIC_ANSWERS.items():
        answers[nct] = {PLAN_NAMES[i]: a for i, a in enumerate(per_plan)}
    write_json(FIXTURES / "gastric_answers.json", answers)
    write_json(FIXTURES / "gastric_labels.json", GASTRIC_LABELS)
    write_json(FIXTURES / "prefilter_corpus.json", [s for s, _ in PREFILTER_STUDIES])
    write_json(FIXTURES / "prefilter_labels.json",
               {s["protocolSection"]["identificationModule"]["nctId"]: label for s, label in PREFILTER_STUDIES})


if __name__ == "__main__":
    main()
