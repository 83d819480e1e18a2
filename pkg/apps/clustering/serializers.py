from rest_framework import serializers

from apps.features.catalog import FEATURE_COUNT


class CentroidRowField(serializers.ListField):
    child = serializers.FloatField(min_value=0.0, max_value=1.0)

    def __init__(self, **kwargs):
        kwargs.setdefault("min_length", FEATURE_COUNT)
        kwargs.setdefault("max_length", FEATURE_COUNT)
        super().__init__(**kwargs)


class CentroidsDocumentSerializer(serializers.Serializer):
    """
    A centroids file written by ``cluster``.

    Only the fields needed to sample configurations are required; the run
    details are optional so hand-written centroid files load too.
    """

    formatVersion = serializers.IntegerField(min_value=1)
    featureOrder = serializers.ListField(child=serializers.CharField(), allow_empty=False)
    k = serializers.IntegerField(min_value=1)
    centroids = serializers.ListField(child=CentroidRowField(), allow_empty=False)
    seed = serializers.IntegerField(min_value=0, required=False, allow_null=True)
    nInit = serializers.IntegerField(min_value=1, required=False)
    maxIter = serializers.IntegerField(min_value=1, required=False)
    tolerance = serializers.FloatField(min_value=0.0, required=False)
    inertia = serializers.FloatField(min_value=0.0, required=False)
    clusterSizes = serializers.ListField(child=serializers.IntegerField(min_value=0), required=False)
    iterationsRun = serializers.IntegerField(min_value=0, required=False)
    restartIndex = serializers.IntegerField(min_value=0, required=False)
    assignment = serializers.DictField(child=serializers.IntegerField(min_value=0), required=False)

    def validate(self, attrs):
        if len(attrs["centroids"]) != attrs["k"]:
            raise serializers.ValidationError(
                {"centroids": f"expected {attrs['k']} centroids, found {len(attrs['centroids'])}"}
            )
        sizes = attrs.get("clusterSizes")
        if sizes is not None and len(sizes) != attrs["k"]:
            raise serializers.ValidationError({"clusterSizes": "one size per centroid"})
        return attrs
