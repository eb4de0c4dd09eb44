"""Main module of the app"""

from fastapi import FastAPI

from facepnp.api.routers.audit import router as audit_router
from facepnp.api.routers.pose import router as pose_router
from facepnp.container import Container

container = Container()

container.wire(modules=[
    "facepnp.api.routers.pose",
    "facepnp.api.routers.audit",
])


app = FastAPI(title="facepnp")
app.include_router(pose_router, prefix="/pose")
app.include_router(audit_router, prefix="/audit")
