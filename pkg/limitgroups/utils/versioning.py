from typing import Dict

from limitgroups.config.settings import AppConfig

# Bump a tag when the output of the module changes for the same input.
MODULE_VERSIONS: Dict[str, str] = {
    "words": "1",
    "tree": "1",
    "baumslag": "2",
    "symbolic": "1",
    "surface": "1",
    "construct": "1",
    "targets": "1",
}


def version_tags() -> Dict[str, str]:
    return {"library": AppConfig.VERSION, **MODULE_VERSIONS}
