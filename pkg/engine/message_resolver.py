"""
Message Resolver
================
Loads Markdown summary templates from `messages/` and renders them against
a run report. Templates are jinja2 with an optional frontmatter block
between `---` markers; the rendered Markdown is also converted to HTML.
"""

import logging
from pathlib import Path
from typing import Optional

import markdown
from jinja2 import Environment, StrictUndefined, UndefinedError

logger = logging.getLogger(__name__)


class MessageResolver:
    """Load and render Markdown summary templates."""

    def __init__(self, messages_dir: str = "messages"):
        self.messages_dir = Path(messages_dir)
        self.cache: dict[str, str] = {}
        self.env = Environment(undefined=StrictUndefined, autoescape=False, trim_blocks=True, lstrip_blocks=True)
        self._load_all()

    def _load_all(self):
        """Pre-load all .md files into cache."""
        if not self.messages_dir.exists():
            logger.warning(f"Messages directory not found: {self.messages_dir}")
            return

        for md_file in sorted(self.messages_dir.glob("*.md")):
            content = md_file.read_text(encoding="utf-8")
            parts = content.split("---")
            if content.startswith("---") and len(parts) >= 3:
                body = "---".join(parts[2:]).strip()
            else:
                body = content.strip()
            self.cache[md_file.stem] = body

        logger.info(f"Loaded {len(self.cache)} message templates from {self.messages_dir}")

    def reload(self):
        self.cache.clear()
        self._load_all()

    def resolve(self, message_ref: str, report: dict) -> Optional[dict]:
        """
        Render template `message_ref` against `report`.

        Returns:
            {'markdown': ..., 'html': ...}, or None if the template is
            missing or references a field the report lacks.
        """
        template = self.cache.get(message_ref)
        if template is None:
            logger.warning(f"Message template not found: {message_ref}")
            return None
        try:
            resolved_md = self.env.from_string(template).render(report=report)
        except UndefinedError as e:
            logger.warning(f"Unresolved placeholder in {message_ref}: {e}")
            return None
        return {
            "markdown": resolved_md,
            "html": markdown.markdown(resolved_md, extensions=["tables", "nl2br"]),
        }

    def list_templates(self) -> list[str]:
        return sorted(self.cache.keys())
