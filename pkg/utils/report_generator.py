import json
import logging
from typing import Optional

import pandas as pd

logger = logging.getLogger(__name__)

EMPTY_MARK = "-"


def _format_scalar(value) -> str:
    if value is None:
        return EMPTY_MARK
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (list, tuple)):
        return ", ".join(_format_scalar(v) for v in value) if value else EMPTY_MARK
    return str(value)


def _plain(value):
    """Значение для JSON: numpy-скаляры и кортежи приводятся к встроенным типам"""
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if hasattr(value, "item"):
        return value.item()
    return value


class ReportGenerator:
    """
    Текстовый отчет со строками KEY: value и таблицами pandas.
    Порядок полей - порядок добавления; меток времени нет, поэтому
    одинаковые запуски дают одинаковый вывод.
    """

    def __init__(self, title: str):
        self.title = title
        self.fields = {}
        self.tables = {}

    def add_field(self, key: str, value) -> "ReportGenerator":
        self.fields[key.upper()] = value
        return self

    def add_fields(self, **fields) -> "ReportGenerator":
        for key, value in fields.items():
            self.add_field(key, value)
        return self

    def add_table(self, name: str, rows, columns: Optional[list] = None) -> "ReportGenerator":
        df = rows if isinstance(rows, pd.DataFrame) else pd.DataFrame(list(rows), columns=columns)
        self.tables[name] = df
        logger.debug("Таблица '%s' добавлена в отчет '%s': %d строк", name, self.title, len(df))
        return self

    def render_text(self) -> str:
        lines = [f"REPORT: {self.title}"]
        lines.extend(f"{key}: {_format_scalar(value)}" for key, value in self.fields.items())
        for name, df in self.tables.items():
            lines.append(f"TABLE: {name}")
            if df.empty:
                lines.append(EMPTY_MARK)
            else:
                lines.append(df.to_string(index=False, na_rep=EMPTY_MARK))
        return "\n".join(lines) + "\n"

    def render_json(self) -> str:
        document = {
            "report": self.title,
            "fields": {key: _plain(value) for key, value in self.fields.items()},
            "tables": {name: json.loads(df.to_json(orient="records", force_ascii=False))
                       for name, df in self.tables.items()},
        }
        return json.dumps(document, ensure_ascii=False, indent=2) + "\n"

    def render(self, as_json: bool = False) -> str:
        return self.render_json() if as_json else self.render_text()
