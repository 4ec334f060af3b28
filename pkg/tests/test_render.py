import os
import re
from pathlib import Path

import numpy as np
import pytest

from confcf.cfsearch import Counterfactual, CounterfactualQuery
from confcf.datasets import income_schema
from confcf.ice import GridSpec, ice_curve
from confcf.model import LogisticModel, Prediction
from confcf.render import (
    PlotStyle,
    format_percent,
    format_value,
    render_plot,
    render_sentence,
    render_table,
)
from confcf.tabular import (
    CATEGORICAL,
    CONTINUOUS,
    FeatureChange,
    FeatureSchema,
    FeatureSpec,
    Instance,
)

GOLDEN_DIR = Path(__file__).parent / "golden"

REFERENCE_SENTENCE = (
    "One way you could have got a confidence score of less than 0.5 (0.44) "
    "instead is if Marital Status had taken value Married rather than "
    "Divorced/Widowed."
)


def check_golden(name: str, content: str):
    path = GOLDEN_DIR / name
    if os.environ.get("UPDATE_GOLDENS") == "1":
        GOLDEN_DIR.mkdir(exist_ok=True)
        path.write_text(content, encoding="utf-8")
        return
    assert path.exists(), f"golden file {name} missing; regenerate with UPDATE_GOLDENS=1"
    assert content == path.read_text(encoding="utf-8")


def table_fixture():
    """The worked income example: marital-status flips on a fixed person."""
    config = income_schema()
    schema = config.schema
    original = Instance(
        (
            "Divorced/Widowed",
            10.0,
            "Service",
            34.0,
            "No",
            37.0,
            "Professional or Associate Degree",
        )
    )
    # negative-class prediction (p < 0.5): confidence 91.5%
    prediction = Prediction(0.0425, "Lower than $50,000", 0.915)

    def flip(level, confidence):
        instance = original.replace(0, level)
        return Counterfactual(
            instance=instance,
            cost=1.0,
            probability=(1 - confidence) / 2,
            confidence=confidence,
            changed_features=(FeatureChange("Marital Status", "Divorced/Widowed", level),),
        )

    return schema, original, prediction, [flip("Married", 0.436), flip("Never Married", 0.944)]


class TestFormatting:
    @pytest.mark.parametrize(
        "value,expected",
        [
            (1.0986122886681098, "1.099"),
            (400.0, "400"),
            (37.0, "37"),
            (0.0001234, "0.0001234"),
            (12345.6, "12350"),
            (-2.71828, "-2.718"),
            (0.0, "0"),
            ("Married", "Married"),
        ],
    )
    def test_four_significant_digits(self, value, expected):
        assert format_value(value) == expected

    def test_percent_formatting(self):
        assert format_percent(0.915) == "91.5%"
        assert format_percent(0.436) == "43.6%"
        assert format_percent(1.0) == "100.0%"


class TestSentence:
    def test_reference_sentence_verbatim(self):
        query = CounterfactualQuery(
            Instance(("Divorced/Widowed",)), "lower", 0.5
        )
        cf = Counterfactual(
            instance=Instance(("Married",)),
            cost=1.0,
            probability=0.282,
            confidence=0.436,
            changed_features=(
                FeatureChange("Marital Status", "Divorced/Widowed", "Married"),
            ),
        )
        assert render_sentence(query, cf) == REFERENCE_SENTENCE
        check_golden("sentence.txt", render_sentence(query, cf) + "\n")

    def test_raise_direction_with_numeric_change(self):
        query = CounterfactualQuery(Instance((300.0,)), "raise", 0.9)
        cf = Counterfactual(
            instance=Instance((400.0,)),
            cost=1.0,
            probability=0.96,
            confidence=0.92,
            changed_features=(FeatureChange("Daily Rate", 300.0, 400.0),),
        )
        sentence = render_sentence(query, cf)
        assert "more than 0.9 (0.92)" in sentence
        assert "Daily Rate had taken value 400 rather than 300" in sentence

    def test_two_changes_joined_with_and(self):
        query = CounterfactualQuery(Instance(("A", 1.0)), "lower", 0.5)
        cf = Counterfactual(
            instance=Instance(("B", 2.5)),
            cost=2.0,
            probability=0.6,
            confidence=0.2,
            changed_features=(
                FeatureChange("Job", "A", "B"),
                FeatureChange("Hours", 1.0, 2.5),
            ),
        )
        sentence = render_sentence(query, cf)
        assert (
            "if Job had taken value B and Hours had taken value 2.5 "
            "rather than A and 1" in sentence
        )


class TestTable:
    def test_reference_layout(self):
        schema, original, prediction, alternatives = table_fixture()
        doc = render_table(schema, original, prediction, alternatives)
        lines = doc.text.splitlines()
        assert lines[0].split("|")[0].strip() == "Attribute"
        assert "Alternative 1" in lines[0] and "Alternative 2" in lines[0]
        assert lines[0].rstrip().endswith("Original Value")
        marital_row = next(l for l in lines if l.startswith("Marital Status"))
        assert "Married" in marital_row and "Divorced/Widowed" in marital_row
        age_row = next(l for l in lines if l.startswith("Age"))
        assert age_row.count("-") == 2
        confidence_row = next(l for l in lines if l.startswith("Confidence score"))
        assert "43.6%" in confidence_row
        assert "94.4%" in confidence_row
        assert "91.5%" in confidence_row
        assert lines[-1].startswith("AI prediction")
        assert "Lower than $50,000" in lines[-1]
        check_golden("table.txt", doc.text)
        check_golden("table.html", doc.html)

    def test_html_has_spanning_footer(self):
        schema, original, prediction, alternatives = table_fixture()
        doc = render_table(schema, original, prediction, alternatives)
        assert 'colspan="3"' in doc.html
        assert doc.html.count("<tr>") + doc.html.count('<tr class="') == len(schema) + 3

    def test_single_change_yields_single_marked_cell(self):
        schema, original, prediction, alternatives = table_fixture()
        doc = render_table(schema, original, prediction, alternatives[:1])
        feature_lines = doc.text.splitlines()[2 : 2 + len(schema)]
        changed = [l for l in feature_lines if l.split("|")[1].strip() != "-"]
        assert len(changed) == 1
        assert changed[0].startswith("Marital Status")

    def test_zero_alternatives_rejected(self):
        schema, original, prediction, _ = table_fixture()
        with pytest.raises(ValueError):
            render_table(schema, original, prediction, [])

    def test_class_crossing_alternative_rejected(self):
        schema, original, prediction, alternatives = table_fixture()
        crossed = Counterfactual(
            instance=alternatives[0].instance,
            cost=1.0,
            probability=0.8,  # opposite side of the boundary
            confidence=0.6,
            changed_features=alternatives[0].changed_features,
        )
        with pytest.raises(ValueError):
            render_table(schema, original, prediction, [crossed])


def categorical_curve():
    schema = FeatureSchema(
        (FeatureSpec("Marital Status", CATEGORICAL, levels=("Divorced/Widowed", "Married", "Never Married")),)
    )
    model = LogisticModel(-1.2, np.array([0.4, -1.1, 1.9]), ("low", "high"))
    return ice_curve(model, schema, Instance(("Divorced/Widowed",)), "Marital Status")


def continuous_curve(points=101):
    schema = FeatureSchema((FeatureSpec("Age", CONTINUOUS, lower=0.0, upper=10.0),))
    model = LogisticModel(-2.0, np.array([0.6]), ("low", "high"))
    step = 10.0 / (points - 1)
    return ice_curve(model, schema, Instance((4.0,)), "Age", GridSpec(0.0, 10.0, step))


class TestPlot:
    def test_categorical_bar_chart(self):
        svg = render_plot(categorical_curve())
        bars = re.findall(r'<rect x="[\d.]+" y="[\d.]+"', svg)
        assert len(bars) == 3
        assert svg.count(PlotStyle().highlight_color) == 1
        assert "low — Marital Status" in svg  # "{class} — {feature}" title
        check_golden("curve_categorical.svg", svg)

    def test_continuous_polyline(self):
        svg = render_plot(continuous_curve())
        match = re.search(r'<polyline points="([^"]+)"', svg)
        assert match and len(match.group(1).split()) == 101
        check_golden("curve_continuous.svg", svg)

    def test_flat_curve_is_horizontal(self):
        schema = FeatureSchema((FeatureSpec("x", CONTINUOUS, lower=0.0, upper=10.0),))
        model = LogisticModel(0.8, np.array([0.0]), ("low", "high"))
        curve = ice_curve(model, schema, Instance((2.0,)), "x", GridSpec(0.0, 10.0, 1.0))
        svg = render_plot(curve)
        match = re.search(r'<polyline points="([^"]+)"', svg)
        ys = {pair.split(",")[1] for pair in match.group(1).split()}
        assert len(ys) == 1

    def test_byte_identical_across_runs(self):
        assert render_plot(categorical_curve()) == render_plot(categorical_curve())
        assert render_plot(continuous_curve()) == render_plot(continuous_curve())

    def test_empty_curve_rejected(self):
        from confcf.ice import IceCurve

        with pytest.raises(ValueError):
            render_plot(IceCurve("x", (), "high", None))

    def test_highlighted_origin_point_on_continuous(self):
        svg = render_plot(continuous_curve())
        assert "<circle" in svg
