"""
JSON schema definitions for the lab's JSON outputs.
Every JSON file the CLI writes is checked against one of these before it lands.
"""
from typing import Any, Dict, List

from jsonschema import Draft7Validator

from src.core.exceptions import InvariantError

# Common schema components
COMMON_SCHEMAS = {
    "timestamp": {
        "type": "string",
        "format": "date-time",
        "description": "ISO 8601 timestamp"
    },
    "number_or_null": {"type": ["number", "null"]},
    "window": {
        "type": ["array", "null"],
        "items": {"type": "number"},
        "minItems": 2,
        "maxItems": 2
    },
    "file_entry": {
        "type": "object",
        "properties": {
            "path": {"type": "string"},
            "bytes": {"type": "integer", "minimum": 0},
            "sha256": {"type": "string", "pattern": "^[0-9a-f]{64}$"}
        },
        "required": ["path", "bytes", "sha256"]
    }
}

RunManifestSchema = {
    "type": "object",
    "properties": {
        "command": {"type": "string"},
        "argv": {"type": "array", "items": {"type": "string"}},
        "version": {"type": "string"},
        "config": {"type": "object"},
        "settings": {"type": "object"},
        "started_at": COMMON_SCHEMAS["timestamp"],
        "finished_at": COMMON_SCHEMAS["timestamp"],
        "wall_time": {"type": "number", "minimum": 0},
        "exit_code": {"type": "integer", "minimum": 0, "maximum": 5},
        "files": {"type": "array", "items": COMMON_SCHEMAS["file_entry"]},
        "timings": {"type": "object"},
        "results": {"type": "object"}
    },
    "required": ["command", "version", "config", "started_at", "finished_at", "exit_code", "files"]
}

FitSchema = {
    "type": "object",
    "properties": {
        "alpha": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
        "level": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
        "side": {"type": "string", "enum": ["right", "left"]},
        "sigma_linear": {"type": "number"},
        "sigma_exp": COMMON_SCHEMAS["number_or_null"],
        "crossover_time": COMMON_SCHEMAS["number_or_null"],
        "crossover_factor": {"type": "number", "exclusiveMinimum": 1},
        "tau_alpha": COMMON_SCHEMAS["number_or_null"],
        "tau_log": COMMON_SCHEMAS["number_or_null"],
        "linear_window": COMMON_SCHEMAS["window"],
        "exp_window": COMMON_SCHEMAS["window"],
        "residuals": {
            "type": "object",
            "properties": {
                "linear": {"type": "number", "minimum": 0},
                "exp": COMMON_SCHEMAS["number_or_null"]
            },
            "required": ["linear", "exp"]
        }
    },
    "required": ["alpha", "level", "sigma_linear", "sigma_exp", "crossover_time", "tau_alpha",
                 "tau_log", "linear_window", "exp_window", "residuals"]
}

TransitionScalesSchema = {
    "type": "object",
    "properties": {
        "alpha": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
        "d": {"type": "integer", "minimum": 1},
        "C_alpha": {"type": "number", "exclusiveMinimum": 0},
        "xi_alpha": {"type": "number", "exclusiveMinimum": 0},
        "tau_alpha": {"type": "number", "exclusiveMinimum": 0},
        "tau_log": {"type": "number", "exclusiveMinimum": 0},
        "ratio": {"type": "number", "exclusiveMinimum": 0}
    },
    "required": ["alpha", "d", "xi_alpha", "tau_alpha", "tau_log", "ratio"]
}

TransitionTableSchema = {
    "type": "object",
    "properties": {
        "scales": {"type": "array", "items": TransitionScalesSchema},
        "monotone": {"type": "boolean"},
        "band": COMMON_SCHEMAS["window"],
        "in_band": {"type": "boolean"}
    },
    "required": ["scales", "monotone"]
}

ScalingReportSchema = {
    "type": "object",
    "properties": {
        "d": {"type": "integer", "minimum": 1},
        "x_range": COMMON_SCHEMAS["window"],
        "n_samples": {"type": "integer", "minimum": 2},
        "entries": {
            "type": "array",
            "items": {
                "type": "object",
                "properties": {
                    "alpha": {"type": "number"},
                    "r_alpha": COMMON_SCHEMAS["number_or_null"],
                    "x_at_sup": COMMON_SCHEMAS["number_or_null"],
                    "tail_slope": COMMON_SCHEMAS["number_or_null"],
                    "max_abs_residual": COMMON_SCHEMAS["number_or_null"],
                    "error": {"type": ["string", "null"]}
                },
                "required": ["alpha", "r_alpha", "error"]
            }
        },
        "ratio": COMMON_SCHEMAS["number_or_null"],
        "ratio_limit": {"type": "number", "minimum": 1},
        "passed": {"type": "boolean"}
    },
    "required": ["d", "entries", "ratio", "ratio_limit", "passed"]
}

# Registry of all schemas
SCHEMA_REGISTRY = {
    "manifest": RunManifestSchema,
    "fit": FitSchema,
    "transition_scales": TransitionScalesSchema,
    "transition_table": TransitionTableSchema,
    "scaling_report": ScalingReportSchema,
}


class SchemaValidator:
    """Utility class for schema validation"""

    @staticmethod
    def get_schema(schema_name: str) -> Dict[str, Any]:
        """Get schema by name"""
        if schema_name not in SCHEMA_REGISTRY:
            raise ValueError(f"Schema '{schema_name}' not found in registry")
        return SCHEMA_REGISTRY[schema_name]

    @staticmethod
    def validate(schema_name: str, data: Dict[str, Any]) -> Dict[str, Any]:
        """
        Validate data against schema, collecting every error.

        Args:
            schema_name: Name of the schema to validate against
            data: Data to validate

        Returns:
            Dictionary with validation results
        """
        schema = SchemaValidator.get_schema(schema_name)
        errors: List[Dict[str, Any]] = [{
            "path": list(e.path),
            "message": e.message,
            "validator": e.validator,
            "validator_value": e.validator_value
        } for e in sorted(Draft7Validator(schema).iter_errors(data), key=lambda e: list(map(str, e.path)))]
        return {
            "valid": not errors,
            "errors": errors,
            "schema": schema_name
        }

    @staticmethod
    def require_valid(schema_name: str, data: Dict[str, Any]):
        """Raise InvariantError when ``data`` does not match the schema"""
        result = SchemaValidator.validate(schema_name, data)
        if not result["valid"]:
            first = result["errors"][0]
            raise InvariantError(
                f"{schema_name} output fails its schema at {first['path']}: {first['message']}")
