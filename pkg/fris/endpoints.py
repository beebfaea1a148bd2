from rest_framework import serializers, viewsets
from rest_framework.decorators import action
from rest_framework.response import Response

from .models import SweepRun, TrialResult


class TrialResultSerializer(serializers.ModelSerializer):
    class Meta:
        model = TrialResult
        fields = ('id', 'run', 'sweep_value', 'trial', 'scheme', 'secrecy_rate',
                  'objective_ratio', 'ao_iters', 'wall_ms', 'seed')
        read_only_fields = fields


class TrialResultViewSet(viewsets.ReadOnlyModelViewSet):
    queryset = TrialResult.objects.select_related("run").order_by("run", "sweep_value", "trial", "scheme")
    serializer_class = TrialResultSerializer
    filterset_fields = ('run', 'scheme', 'sweep_value', 'trial')


class SweepRunSerializer(serializers.ModelSerializer):
    status = serializers.CharField(source='get_status_display', read_only=True)

    class Meta:
        model = SweepRun
        fields = ('id', 'preset', 'sweep_variable', 'config', 'base_seed', 'trials',
                  'status', 'message', 'date_added', 'date_updated')
        read_only_fields = fields


class SweepRunViewSet(viewsets.ReadOnlyModelViewSet):
    queryset = SweepRun.objects.order_by("-date_added")
    serializer_class = SweepRunSerializer
    filterset_fields = ('preset', 'sweep_variable', 'status', 'base_seed')

    @action(detail=True)
    def summary(self, request, pk=None):
        rows = [
            {
                "sweep_value": row["sweep_value"],
                "scheme": row["scheme"],
                "mean_secrecy_rate": row["mean_rate"],
                "trials": row["trials"],
            }
            for row in self.get_object().summary()
        ]
        return Response(rows)


# curl -H 'Accept: application/json; indent=4' 'http://127.0.0.1:8000/api/results/?run=1&scheme=ao_ceo'
