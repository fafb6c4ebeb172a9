"""Tests des extracteurs : TPL, PTM, modules NN et extraction incrémentale."""

import random

import pytest

from nnbom.exceptions import CatalogError
from nnbom.extractors.module_extractor import resolve_inheritance
from nnbom.extractors.ptm_detector import PtmPatternCatalog, detect_ptms
from nnbom.extractors.tpl_extractor import (
    ImportKind,
    RepoLayout,
    classify_import,
    external_import_roots,
    extract_config_tpls,
    merge_tpls,
)
from nnbom.extractors.version_extractor import VersionExtractor, changed_units
from nnbom.models import Hub, Resolution, TplDependency, TplSource
from nnbom.parsers.source_parser import ImportDecl, parse_source


def _units(files):
    return [parse_source(text, path) for path, text in sorted(files.items())]


# --- TPL ---

def test_classify_import():
    layout = {"pkg", "utils"}
    assert classify_import(ImportDecl(path=("numpy",)), layout) is ImportKind.EXTERNAL
    assert classify_import(ImportDecl(path=("pkg", "a")), layout) is ImportKind.LOCAL
    assert classify_import(ImportDecl(path=("x",), level=1), layout) is ImportKind.LOCAL
    assert classify_import(ImportDecl(path=(), level=1), layout) is ImportKind.LOCAL


def test_external_import_roots_excludes_local_and_stdlib():
    files = {
        "pkg/__init__.py": "",
        "pkg/a.py": "import helpers\nimport utils\nimport numpy as np\nimport os\nfrom . import b\nimport sklearn.svm\n",
        "pkg/helpers.py": "",
        "utils.py": "import os.path\n",
    }
    units = _units(files)
    layout = RepoLayout(files)
    assert external_import_roots(units, layout) == ["numpy", "sklearn"]
    assert external_import_roots(units, layout, exclude_stdlib=False) == ["numpy", "os", "sklearn"]


def test_extract_config_tpls_from_all_sources():
    tree = {
        "requirements.txt": (
            b"# comment\n"
            b"torch==1.4.0  # pinned\n"
            b"numpy>=1.18\n"
            b"-r other.txt\n"
            b"--index-url https://example.org/simple\n"
            b"scipy==1.5.*\n"
            b"requests \\\n"
            b"    ==2.25.1\n"
            b"git+https://github.com/x/y.git\n"
            b"Pillow\n"
        ),
        "setup.py": (
            b"from setuptools import setup\n"
            b"REQUIRES = ['tqdm>=4', 'PyYAML==5.3']\n"
            b"setup(name='x', install_requires=REQUIRES)\n"
        ),
        "setup.cfg": b"[options]\ninstall_requires =\n    einops==0.3.0\n    timm\n",
        "pyproject.toml": (
            b"[project]\n"
            b"dependencies = ['rich>=10']\n"
            b"[tool.poetry.dependencies]\n"
            b"python = '^3.8'\n"
            b"Click = '7.1.2'\n"
            b"attrs = {version = '^20.0'}\n"
        ),
        "docs/notes.txt": b"not-a-dependency==1.0\n",
    }
    diagnostics = []
    tpls = extract_config_tpls(tree, diagnostics)
    assert [(t.name, t.version) for t in tpls] == [
        ("attrs", None),
        ("click", "7.1.2"),
        ("einops", "0.3.0"),
        ("numpy", None),
        ("pillow", None),
        ("pyyaml", "5.3"),
        ("requests", "2.25.1"),
        ("rich", None),
        ("scipy", None),
        ("timm", None),
        ("torch", "1.4.0"),
        ("tqdm", None),
    ]
    assert all(t.source is TplSource.CONFIG for t in tpls)
    assert len(diagnostics) == 1
    assert "git+https" in diagnostics[0]


def test_merge_tpls_config_has_priority():
    config = [
        TplDependency(name="torch", version="1.4.0", source=TplSource.CONFIG),
        TplDependency(name="numpy", source=TplSource.CONFIG),
    ]
    merged = merge_tpls(config, ["torch", "Einops_X"])
    assert [(t.name, t.version, t.source) for t in merged] == [
        ("einops-x", None, TplSource.IMPORT),
        ("numpy", None, TplSource.CONFIG),
        ("torch", "1.4.0", TplSource.BOTH),
    ]


@pytest.mark.parametrize("seed", range(10))
def test_merge_tpls_ignores_import_order_and_repeats(seed):
    rng = random.Random(seed)
    config = [
        TplDependency(name="torch", version="1.4.0", source=TplSource.CONFIG),
        TplDependency(name="numpy", source=TplSource.CONFIG),
        TplDependency(name="scipy", version="1.5", source=TplSource.CONFIG),
    ]
    imported = rng.sample(["torch", "Einops_X", "einops-x", "PIL", "numpy", "tqdm"], rng.randint(0, 6))
    merged = merge_tpls(config, imported)
    shuffled = imported * 2
    rng.shuffle(shuffled)
    assert merge_tpls(config, shuffled) == merged
    assert merge_tpls(merged, imported) == merged
    assert [t.name for t in merged] == sorted({t.name for t in merged})


def test_import_only_tpl_cannot_carry_a_version():
    with pytest.raises(ValueError):
        TplDependency(name="x", version="1.0", source=TplSource.IMPORT)


# --- PTM ---

PTM_SOURCE = '''import torch
import tensorflow_hub as hub
from transformers import pipeline, AutoTokenizer
from vllm import LLM

CKPT = "gpt2"
tok = AutoTokenizer.from_pretrained(CKPT)
clf = pipeline("sentiment-analysis", model="distilbert-base")
enc = hub.KerasLayer("https://tfhub.dev/x/1")
net = torch.hub.load("pytorch/vision", "resnet18", pretrained=True)
llm = LLM(model="meta-llama/Llama-2-7b")
dyn = AutoTokenizer.from_pretrained(input())
ner = pipeline("ner")
'''


def test_detect_ptms_literal_symbol_table_and_unresolved():
    ptms = detect_ptms([parse_source(PTM_SOURCE, "app.py")], catalog=PtmPatternCatalog.default())
    assert [(p.line, p.hub, p.model_path, p.resolution) for p in ptms] == [
        (7, Hub.HUGGINGFACE, "gpt2", Resolution.SYMBOL_TABLE),
        (8, Hub.HUGGINGFACE, "distilbert-base", Resolution.LITERAL),
        (9, Hub.TENSORFLOW_HUB, "https://tfhub.dev/x/1", Resolution.LITERAL),
        (10, Hub.PYTORCH_HUB, "resnet18", Resolution.LITERAL),
        (11, Hub.VLLM, "meta-llama/Llama-2-7b", Resolution.LITERAL),
        (12, Hub.HUGGINGFACE, None, Resolution.UNRESOLVED),
        (13, Hub.HUGGINGFACE, None, Resolution.UNRESOLVED),
    ]
    assert ptms[0].identity == "huggingface:gpt2"
    assert ptms[5].identity is None


def test_unrelated_calls_are_not_ptms():
    unit = parse_source("import json\njson.load(open('x'))\nmodel.load('y')\n", "m.py")
    assert detect_ptms([unit], catalog=PtmPatternCatalog.default()) == []


def test_catalog_reports_every_bad_line():
    text = "huggingface\tonly-two\nunknown-hub\tx.load\tpos:0\nhuggingface\tx.load\tpos:a\n"
    with pytest.raises(CatalogError) as excinfo:
        PtmPatternCatalog.from_text(text, "bad.tsv")
    message = str(excinfo.value)
    assert "bad.tsv:1" in message and "bad.tsv:2" in message and "bad.tsv:3" in message


def test_catalog_validate_warns_on_duplicates_and_shadowing():
    catalog = PtmPatternCatalog.from_text(
        "huggingface\t.from_pretrained\tpos:0\n"
        "nvidia-ngc\ttransformers.AutoModel.from_pretrained\tpos:0\n"
        "huggingface\t.from_pretrained\tkw:x\n"
    )
    warnings = catalog.validate()
    assert len(warnings) == 2
    assert any("masqué" in w for w in warnings)
    assert any("déjà défini" in w for w in warnings)


def test_default_catalog_is_clean_and_first_match_wins():
    catalog = PtmPatternCatalog.default()
    assert catalog.validate() == []
    assert catalog.match("nemo.collections.asr.models.ASRModel.from_pretrained").hub is Hub.NVIDIA_NGC
    assert catalog.match("transformers.AutoModel.from_pretrained").hub is Hub.HUGGINGFACE
    assert catalog.match("torch.load") is None


def test_catalog_text_round_trip():
    catalog = PtmPatternCatalog.default()
    again = PtmPatternCatalog.from_text(catalog.to_text())
    assert [(e.hub, e.pattern, e.selectors) for e in again.entries] == [
        (e.hub, e.pattern, e.selectors) for e in catalog.entries
    ]


# --- Modules NN ---

MODULE_FILES = {
    "pkg/__init__.py": "from .layers import Block\n",
    "pkg/layers.py": "import torch.nn as nn\n\n\nclass Block(nn.Module):\n    pass\n\n\nclass Helper:\n    pass\n",
    "pkg/models.py": (
        "from pkg import Block\nfrom .heads import *\n\n\n"
        "class Net(Block):\n    pass\n\n\nclass Tower(Head):\n    pass\n"
    ),
    "pkg/heads.py": "from .layers import Block as B\n\n\nclass Head(B):\n    pass\n",
    "other.py": "class A(B):\n    pass\n\n\nclass B(A):\n    pass\n\n\nclass NotNN(object):\n    pass\n",
}


def test_inheritance_fixpoint_across_files():
    result = resolve_inheritance(_units(MODULE_FILES))
    by_name = {m.qualified_name: m for m in result.modules}
    assert set(by_name) == {"pkg.heads.Head", "pkg.layers.Block", "pkg.models.Net", "pkg.models.Tower"}
    assert by_name["pkg.models.Tower"].derivation_chain == (
        "pkg.heads.Head", "pkg.layers.Block", "torch.nn.Module",
    )
    assert by_name["pkg.layers.Block"].derivation_chain == ("torch.nn.Module",)
    assert by_name["pkg.models.Net"].file == "pkg/models.py"
    assert by_name["pkg.models.Net"].name == "Net"


def test_inheritance_trace_is_monotone():
    trace = resolve_inheritance(_units(MODULE_FILES)).trace
    assert trace == (2, 4, 4)
    assert all(a <= b for a, b in zip(trace, trace[1:]))


def test_module_source_and_loc():
    result = resolve_inheritance(_units(MODULE_FILES))
    block = next(m for m in result.modules if m.name == "Block")
    assert block.source == "class Block(nn.Module):\n    pass\n"
    assert block.loc == 2
    assert block.first_line == 4


def test_custom_framework_root():
    files = {"m.py": "import tensorflow as tf\n\n\nclass Dense(tf.keras.layers.Layer):\n    pass\n"}
    assert resolve_inheritance(_units(files)).modules == ()
    modules = resolve_inheritance(_units(files), root="tensorflow.keras.layers.Layer").modules
    assert [m.qualified_name for m in modules] == ["m.Dense"]


def test_version_extractor_assembles_all_components():
    tree = {
        "requirements.txt": b"torch==2.0.0\n",
        "model.py": (
            b"import torch\nfrom transformers import AutoModel\n\n\n"
            b"class Net(torch.nn.Module):\n    def __init__(self):\n"
            b"        super().__init__()\n        self.enc = AutoModel.from_pretrained('bert-base')\n"
        ),
        "README.md": b"# readme\n",
    }
    extraction = VersionExtractor(catalog=PtmPatternCatalog.default()).extract(tree)
    assert [(t.name, t.version, t.source) for t in extraction.tpls] == [
        ("torch", "2.0.0", TplSource.BOTH),
        ("transformers", None, TplSource.IMPORT),
    ]
    assert [p.model_path for p in extraction.ptms] == ["bert-base"]
    assert [m.qualified_name for m in extraction.modules] == ["model.Net"]
    assert extraction.diagnostics == ()


# --- Incrémental ---

def _random_file(rng: random.Random, index: int, existing) -> str:
    lines = ["import torch.nn as nn"]
    if rng.random() < 0.3:
        lines.append("import numpy")
    body = []
    for suffix in "ab"[: rng.randint(0, 2)]:
        choice = rng.random()
        if choice < 0.4:
            base = "nn.Module"
        elif choice < 0.5 or not existing:
            base = "object"
        else:
            other = rng.choice(sorted(existing))
            lines.append(f"from m{other} import C{other}a")
            base = f"C{other}a"
        body.append(f"class C{index}{suffix}({base}):\n    pass\n")
    if rng.random() < 0.3:
        lines.append("from transformers import AutoModel")
        body.append(f"model = AutoModel.from_pretrained('model-{rng.randint(0, 3)}')\n")
    return "\n".join(lines) + "\n\n\n" + "\n\n".join(body)


def _snapshot(extraction):
    return (
        {(m.qualified_name, m.file, m.source, m.derivation_chain) for m in extraction.modules},
        extraction.tpls,
        extraction.ptms,
    )


@pytest.mark.parametrize("seed", range(50))
def test_incremental_equals_full_extraction(seed):
    rng = random.Random(seed)
    extractor = VersionExtractor(catalog=PtmPatternCatalog.default())
    tree = {}
    for index in range(rng.randint(1, 4)):
        tree[f"m{index}.py"] = _random_file(rng, index, [i for i in range(index)]).encode()
    previous = extractor.extract(tree)
    next_index = len(tree)

    for _ in range(5):
        changed = set()
        for _ in range(rng.randint(1, 3)):
            action = rng.random()
            existing = sorted(int(p[1:-3]) for p in tree)
            if action < 0.4 or not existing:
                path = f"m{next_index}.py"
                tree[path] = _random_file(rng, next_index, existing).encode()
                next_index += 1
            elif action < 0.8:
                target = rng.choice(existing)
                path = f"m{target}.py"
                tree[path] = _random_file(rng, target, [i for i in existing if i != target]).encode()
            else:
                path = f"m{rng.choice(existing)}.py"
                del tree[path]
            changed.add(path)

        snapshot = dict(tree)
        incremental = extractor.incremental(previous, changed, changed_units(extractor, snapshot, changed), snapshot)
        full = extractor.extract(snapshot)
        assert _snapshot(incremental) == _snapshot(full)
        previous = incremental
