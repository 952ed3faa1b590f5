from django.urls import re_path
from . import consumers

websocket_urlpatterns = [
    re_path(r'ws/matrix/(?P<matrix_id>\d+)/$', consumers.MatrixProgressConsumer.as_asgi()),
]
