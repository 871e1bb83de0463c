"""traitline: cohort selection and behavioral trait classification for archived social-media data."""

__version__ = "0.1.0"
