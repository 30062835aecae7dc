from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware
import uvicorn
import os
from dotenv import load_dotenv

# Load environment variables
load_dotenv()

from app.core.logging import configure_logging

configure_logging()

# Create FastAPI app
app = FastAPI(
    title="Lattice Pricer",
    description="Binomial lattice pricing by static hedging with Arrow-Debreu securities",
    version="0.1.0",
)

app.add_middleware(
    CORSMiddleware,
    allow_origins=["http://localhost:3000", "http://localhost:8000"],
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)

# Import and include routers
from app.api import pricing
from app.models.schemas import HealthCheckResponse

app.include_router(pricing.router)


# Health check endpoint
@app.get("/health", response_model=HealthCheckResponse)
async def health_check():
    return HealthCheckResponse(status="healthy", service="lattice-pricer")


# Root endpoint
@app.get("/")
async def root():
    return {"message": "Lattice Pricer API", "version": "0.1.0", "docs": "/docs"}


if __name__ == "__main__":
    port = int(os.getenv("PORT", 8000))
    uvicorn.run(app, host="0.0.0.0", port=port)
