"""Exception hierarchy for the extraction engine."""


class VolverError(Exception):
    """Base class for all engine errors."""


# --- corpus ---------------------------------------------------------------

class ManifestNotFound(VolverError):
    pass


class ManifestMalformed(VolverError):
    def __init__(self, line_number, message):
        super().__init__(f"manifest line {line_number}: {message}")
        self.line_number = line_number


class DuplicateVolume(VolverError):
    def __init__(self, volume_id):
        super().__init__(f"volume {volume_id} listed more than once")
        self.volume_id = volume_id


class MissingFile(VolverError):
    def __init__(self, path):
        super().__init__(f"manifest references absent file: {path}")
        self.path = path


class UnknownVolume(VolverError):
    def __init__(self, volume_id):
        super().__init__(f"no entry for volume {volume_id}")
        self.volume_id = volume_id


class FetchFailed(VolverError):
    def __init__(self, iri, cause):
        super().__init__(f"fetch failed for {iri}: {cause}")
        self.iri = iri
        self.cause = cause


class AllFetchesFailed(VolverError):
    pass


# --- template engine ------------------------------------------------------

class DuplicatePriority(VolverError):
    def __init__(self, kind, priority):
        super().__init__(f"template already registered at ({kind.name}, {priority})")
        self.kind = kind
        self.priority = priority


class NoTemplateMatched(VolverError):
    def __init__(self, source_iri, reasons):
        detail = "; ".join(f"{tid}: {why}" for tid, why in reasons)
        super().__init__(f"no template matched {source_iri} ({detail})")
        self.source_iri = source_iri
        self.reasons = reasons


class NoVolumesFound(VolverError):
    pass


# --- rdf ------------------------------------------------------------------

class UnmintableEntity(VolverError):
    pass


class InvalidInterval(VolverError):
    def __init__(self, start, end):
        super().__init__(f"interval start {start} is after end {end}")
        self.start = start
        self.end = end


# --- entity linking -------------------------------------------------------

class EmptyCandidateList(VolverError):
    pass


class EndpointUnreachable(VolverError):
    def __init__(self, endpoint, attempts, cause):
        super().__init__(f"endpoint {endpoint} unreachable after {attempts} attempts: {cause}")
        self.endpoint = endpoint
        self.attempts = attempts
        self.cause = cause


class MalformedResponse(VolverError):
    pass
