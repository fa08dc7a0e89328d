"""Deployment configuration: providers, budgets, prompt templates, service port.

One JSON or YAML file drives the CLI and the service:

    {
      "providers": [{"provider_id": ..., "endpoint": ..., "model_name": ...,
                     "temperature": 1.0, "max_output_tokens": 2048,
                     "price_per_million_input_tokens": "3.00",
                     "price_per_million_output_tokens": "15.00",
                     "auth_env": "JUDGE_API_KEY"}],
      "budgets": {"max_iterations": 50, "max_total_tokens": 400000},
      "limits": {"page_chars": 4096, "max_search_hits": 25},
      "category_prompt_dir": "prompts/",
      "service_port": 8321
    }
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import yaml

from .errors import SchemaError
from .judge.prompts import CATEGORY_TEMPLATES, load_category_templates
from .judge.providers import ProviderConfig, parse_provider_configs
from .judge.session import JudgeBudget, ToolLimits


@dataclass
class AppConfig:
    providers: dict[str, ProviderConfig] = field(default_factory=dict)
    budget: JudgeBudget = field(default_factory=JudgeBudget)
    limits: ToolLimits = field(default_factory=ToolLimits)
    category_templates: dict = field(default_factory=lambda: dict(CATEGORY_TEMPLATES))
    service_port: int = 8321


def parse_config(doc: dict, base_dir: Path | None = None) -> AppConfig:
    if not isinstance(doc, dict):
        raise SchemaError("config must be an object")
    budgets = doc.get("budgets", {})
    if not isinstance(budgets, dict):
        raise SchemaError("must be an object", path="$.budgets")
    limits = doc.get("limits", {})
    if not isinstance(limits, dict):
        raise SchemaError("must be an object", path="$.limits")

    templates = dict(CATEGORY_TEMPLATES)
    template_dir = doc.get("category_prompt_dir")
    if template_dir:
        directory = Path(template_dir)
        if base_dir is not None and not directory.is_absolute():
            directory = base_dir / directory
        templates = load_category_templates(directory)

    return AppConfig(
        providers=parse_provider_configs(doc),
        budget=JudgeBudget(
            max_iterations=int(budgets.get("max_iterations", 50)),
            max_total_tokens=int(budgets.get("max_total_tokens", 400_000)),
            compress_threshold_tokens=budgets.get("compress_threshold_tokens"),
        ),
        limits=ToolLimits(
            page_chars=int(limits.get("page_chars", 4096)),
            max_search_hits=int(limits.get("max_search_hits", 25)),
        ),
        category_templates=templates,
        service_port=int(doc.get("service_port", 8321)),
    )


def load_config(path) -> AppConfig:
    path = Path(path)
    with open(path, "r", encoding="utf-8") as fh:
        doc = yaml.safe_load(fh.read())
    return parse_config(doc or {}, base_dir=path.parent)
