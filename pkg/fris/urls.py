from django.urls import path, include

from rest_framework import routers

from .endpoints import SweepRunViewSet, TrialResultViewSet


router = routers.DefaultRouter()
router.register(r'runs', SweepRunViewSet)
router.register(r'results', TrialResultViewSet)

urlpatterns = [
    path('api/', include(router.urls)),
]
