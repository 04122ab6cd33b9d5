"""Service layer: pydantic schemas, request handlers, FastAPI app."""
