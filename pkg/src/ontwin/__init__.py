"""ontwin: a desk-scale optical network digital twin.

Per-lightpath QoT estimation on the Gaussian-noise framework, what-if
provisioning with impact analysis, telemetry ingestion with fault
localization, and multi-operator QoT composition, behind an HTTP/JSON
service and a CLI.
"""

__version__ = "0.1.0"
